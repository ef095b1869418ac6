import math
from fractions import Fraction

import mpmath
import pytest

from magnuslab.errors import DomainError
from magnuslab.linalg import NormKind, op_norm
from magnuslab.measures import weighted_second_term
from magnuslab.bounds import (
    DimensionProfile,
    LambdaProfile,
    c_infinity,
    c_upper_bound,
    covering_count,
    delay,
    dimension_profile,
    gain_bound,
    gain_bound_trials,
    lambda_lower_bound,
    magnus_radius,
    rogers_theta,
    solve_lambda,
)

LAMBDA3 = 0.0588740902  # profile weight whose radius is pi


def dyadic_grid(n=1024):
    return [i / n for i in range(1, n)]


class TestCInfinity:
    def test_minimum_and_endpoints(self):
        assert c_infinity(0.5) == 2.0
        assert c_infinity(0.0) == math.inf
        assert c_infinity(1.0) == math.inf

    def test_lambda3_maps_to_pi(self):
        assert c_infinity(LAMBDA3) == pytest.approx(math.pi, abs=1e-8)

    def test_symmetry_exact_on_dyadic_grid(self):
        for lam in dyadic_grid():
            assert c_infinity(lam) == c_infinity(1.0 - lam)

    def test_series_switch_is_smooth(self):
        # values straddling the 1e-3 switchover agree with the log form
        for u in (9.9e-4, 1.01e-3):
            lam = (1.0 - u) / 2.0
            direct = math.log((1.0 - lam) / lam) / (1.0 - 2.0 * lam)
            assert c_infinity(lam) == pytest.approx(direct, rel=1e-12)

    def test_midpoint_convexity_on_grid(self):
        lams = dyadic_grid(256)
        vals = {lam: c_infinity(lam) for lam in lams}
        mids = {}
        for i, a in enumerate(lams):
            for b in lams[i + 1 :]:
                m = (a + b) / 2.0
                if m not in mids:
                    mids[m] = c_infinity(m)
                assert mids[m] <= (vals[a] + vals[b]) / 2.0 + 1e-12

    def test_quadratic_minorant(self):
        for lam in dyadic_grid():
            assert c_infinity(lam) >= 2.0 + (8.0 / 3.0) * (lam - 0.5) ** 2

    def test_domain(self):
        with pytest.raises(DomainError):
            c_infinity(-0.1)
        with pytest.raises(DomainError):
            c_infinity(1.1)

    def test_lambda_profile(self):
        prof = LambdaProfile.at(0.5)
        assert prof.c_inf == 2.0


class TestSolveLambda:
    def test_minimum(self):
        assert solve_lambda(2.0) == 0.5

    def test_paper_weight_for_pi(self):
        assert solve_lambda(math.pi) == pytest.approx(LAMBDA3, abs=1e-8)
        assert solve_lambda(math.pi) > 1 / 17

    def test_round_trip(self):
        for lam in [0.001, 0.0588, 0.2, 0.3, 0.45, 0.499]:
            assert solve_lambda(c_infinity(lam)) == pytest.approx(lam, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            solve_lambda(1.9)


class TestCUpperBound:
    def test_three_dimensional_value(self):
        assert c_upper_bound(3) == math.pi

    def test_square_dimension(self):
        assert c_upper_bound(25) == 2.5

    def test_min_with_pi(self):
        # 2 + 2/(isqrt(8)-1) = 4 exceeds pi, so pi still wins below d = 9
        for d in range(4, 9):
            assert c_upper_bound(d) == math.pi
        assert c_upper_bound(9) == 3.0

    def test_domain(self):
        with pytest.raises(DomainError):
            c_upper_bound(2)


class TestLambdaLowerBound:
    def test_base_value(self):
        assert lambda_lower_bound(3) == pytest.approx(LAMBDA3, abs=1e-8)

    def test_above_one_seventeenth(self):
        for d in (3, 10, 100, 1000):
            assert lambda_lower_bound(d) > 1 / 17

    def test_asymptotic_minorant(self):
        d = 10_000
        assert lambda_lower_bound(d) >= 0.5 * (1 - math.sqrt(3 / 99))

    def test_nondecreasing(self):
        vals = [lambda_lower_bound(d) for d in range(3, 201)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_never_exceeds_half(self):
        assert lambda_lower_bound(10**8) <= 0.5


class TestRogersTheta:
    def test_closed_form_agrees_with_minimization(self):
        # the r1 path cross-checks internally; verify the value is sane too
        assert rogers_theta(3, "r1") == pytest.approx(10.0641224, abs=1e-6)

    def test_r4_value(self):
        want = 3 * math.log(3) + 3 * math.log(math.log(3)) + 15
        assert rogers_theta(3, "r4") == pytest.approx(want, rel=1e-12)

    def test_r4_minus_r3_is_linear(self):
        for n in (3, 17, 400):
            got = rogers_theta(n, "r4") - rogers_theta(n, "r3")
            assert got == pytest.approx(3 * n - 1, rel=1e-9)

    def test_chain_on_sample(self):
        for n in (3, 4, 10, 100, 5000):
            r1, r2, r3, r4 = (rogers_theta(n, v) for v in ("r1", "r2", "r3", "r4"))
            assert r1 <= r2 < r3 < r4

    def test_bad_variant_and_domain(self):
        with pytest.raises(DomainError):
            rogers_theta(3, "r5")
        with pytest.raises(DomainError):
            rogers_theta(2, "r1")


class TestCoveringCount:
    def test_value(self):
        assert covering_count(4, 0.5) == pytest.approx(81 * rogers_theta(4, "r1"), rel=1e-12)

    def test_decreasing_in_r(self):
        vals = [covering_count(5, r) for r in (0.2, 0.4, 0.6, 0.8)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            covering_count(5, 1.0)


class TestGainBound:
    def test_zero_weight_gives_trivial_bound(self):
        omega = 1.7
        assert gain_bound(5, 0.0, omega) == omega**2 / 2

    def test_strictly_below_trivial_inside(self):
        omega = 2.0
        for lam in (0.1, 0.5, 0.9):
            assert gain_bound(4, lam, omega) < omega**2 / 2

    def test_trial_dominance_small(self):
        summary = gain_bound_trials(100, 1, [Fraction(1, 10), Fraction(1, 2)])
        assert summary["all_dominated"]
        assert summary["max_ratio"] < 1.0

    def test_exact_lhs_single_measure(self):
        from magnuslab.measures import StepMeasure
        from magnuslab.linalg import RationalMatrix

        phi = StepMeasure.of(
            [
                (RationalMatrix([[0, 1], [0, 0]]), Fraction(1, 2)),
                (RationalMatrix([[0, 0], [1, 0]]), Fraction(1, 2)),
            ]
        )
        omega = 1.0  # unit-norm densities, total duration 1
        for lam in (Fraction(1, 10), Fraction(1, 2)):
            lhs = op_norm(weighted_second_term(phi, lam), NormKind.L1_OP)
            assert float(lhs) <= gain_bound(4, float(lam), omega)

    def test_optimal_r_is_sharper_but_still_dominates(self):
        omega = 2.0
        for n in (3, 4, 10):
            default = gain_bound(n, 0.5, omega)
            sharper = gain_bound(n, 0.5, omega, optimal_r=True)
            assert sharper < default < omega**2 / 2
        summary = gain_bound_trials(50, 3, [Fraction(1, 2)], optimal_r=True)
        assert summary["all_dominated"]

    def test_looser_theta_variant_weakens_bound(self):
        assert gain_bound(4, 0.5, 1.0) < gain_bound(4, 0.5, 1.0, variant="r4")

    def test_domain(self):
        with pytest.raises(DomainError):
            gain_bound(2, 0.5, 1.0)
        with pytest.raises(DomainError):
            gain_bound(4, 1.5, 1.0)
        with pytest.raises(DomainError):
            gain_bound(4, 0.5, -1.0)


class TestDelay:
    def test_values(self):
        assert delay(2.0) == 1.0
        assert delay(1e-12) == pytest.approx(2.5e-13, rel=1e-9)

    def test_radius_identity(self):
        for r in (0.1, 1.0, 3.5):
            assert 2 + 2 * delay(r) == pytest.approx(2 / (1 - r / 4), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            delay(4.0)
        with pytest.raises(DomainError):
            delay(0.0)


class TestMagnusRadius:
    def test_three_dimensional_value(self):
        r = magnus_radius(3)
        assert 2 < r < 2.001

    def test_exceeds_two_at_large_dimension(self):
        # the excess is ~2^-n: far below double resolution, hence mpmath
        r = magnus_radius(200)
        assert r > 2
        assert float(r - 2) > 0

    def test_below_counterexample_bound(self):
        for n in range(9, 201, 10):
            assert magnus_radius(n) <= c_upper_bound(n)

    def test_consistent_with_delay_form(self):
        prof = dimension_profile(6)
        want = 2 + 2 * delay(prof.delay_r)
        assert float(prof.radius) == pytest.approx(want, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            magnus_radius(2)


class TestDimensionProfile:
    def test_profile_3(self):
        prof = dimension_profile(3)
        assert prof.lambda_lower == pytest.approx(LAMBDA3, abs=1e-8)
        assert prof.c_upper == math.pi

    def test_profile_25(self):
        assert dimension_profile(25).c_upper == 2.5

    def test_radius_below_upper_bound_sweep(self):
        for d in range(9, 201, 16):
            prof = dimension_profile(d)
            assert 2 < prof.radius <= prof.c_upper

    def test_serialization(self):
        row = dimension_profile(3).to_json(digits=12)
        assert row["d"] == 3
        assert row["c_upper"].startswith("3.14159265")
        assert isinstance(row["radius"], str)

    def test_invariants_enforced(self):
        with pytest.raises(Exception):
            DimensionProfile(
                d=3,
                theta_r1=10.0,
                theta_r2=9.0,  # violates the chain
                theta_r3=11.0,
                theta_r4=12.0,
                c_upper=math.pi,
                lambda_lower=0.05,
                radius=mpmath.mpf(2.0001),
                delay_r=1e-6,
            )
