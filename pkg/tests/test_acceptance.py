"""Acceptance suite: one test per criterion, each at its stated tolerance and
time budget, printing a single pass/fail line (run `pytest -s` to see them).
"""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from magnuslab.linalg import NormKind, RationalMatrix, exp_float, op_norm, rank_exact
from magnuslab.measures import (
    StepMeasure,
    cumulative_norm,
    magnus_terms,
    rexp_exact,
    rexp_float,
    weighted_second_term,
)
from magnuslab.series import zeta_even
from magnuslab.counterexamples import (
    MinimalPair,
    certify_divergence,
    minimal_log_closed_form,
    minimal_magnus_terms,
    minimal_measure,
    minimal_term_asymptote,
    partial_product_closed_form,
    psi_measure,
    q_matrix,
)
from magnuslab.bounds import (
    c_infinity,
    c_upper_bound,
    gain_bound_trials,
    lambda_lower_bound,
    magnus_radius,
    rogers_theta,
    solve_lambda,
)


@contextmanager
def criterion(num, label, budget):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        status = "PASS" if ok and elapsed < budget else "FAIL"
        print(f"[criterion {num:02d}] {status}  {label}  ({elapsed:.2f}s, budget {budget:g}s)")
    assert elapsed < budget, f"criterion {num} exceeded its {budget}s budget"


REXP_PSI5 = RationalMatrix(
    [
        ["-33/32", "-41/32", "-21/32", "9/32", "27/16"],
        ["-27/16", "-3/16", "-7/16", "3/16", "9/8"],
        ["-9/8", "-9/8", "3/8", "1/8", "3/4"],
        ["-3/4", "-3/4", "-3/4", "3/4", "1/2"],
        ["-1/2", "-1/2", "-1/2", "-1/2", "1"],
    ]
)


def test_criterion_01_rexp_psi5_exact():
    with criterion(1, "Rexp(psi_5) entry-for-entry exact", 1.0):
        assert rexp_exact(psi_measure(5)) == REXP_PSI5


def test_criterion_02_rexp_psi2_psi3_exact():
    with criterion(2, "Rexp(psi_2) and Rexp(psi_3) exact", 1.0):
        assert rexp_exact(psi_measure(2)) == RationalMatrix([[-3, 2], [-2, 1]])
        assert rexp_exact(psi_measure(3)) == RationalMatrix(
            [[-2, -1, 2], [-2, 0, 1], [-1, -1, 1]]
        )


def test_criterion_03_certificates_n2_to_12():
    with criterion(3, "divergence certificates and cumulative norms, n=2..12", 5.0):
        for n in range(2, 13):
            phi = psi_measure(n)
            assert cumulative_norm(phi, NormKind.L1_OP) == Fraction(2 * n, n - 1)
            p = rexp_exact(phi)
            assert p.mul_vector([1] * n) == tuple([Fraction(-1)] * n)
            assert rank_exact(p + RationalMatrix.identity(n)) == n - 1
            cert = certify_divergence(n)
            assert cert.gm_minus_one == 1 and cert.parity_verdict


def test_criterion_04_closed_form_products():
    with criterion(4, "closed-form partial products vs brute force, n<=8", 5.0):
        for s in (Fraction(1, 3), Fraction(2), Fraction(7, 5), Fraction(4)):
            for n in range(2, 9):
                brute = RationalMatrix.identity(n)
                for k in range(1, n + 1):
                    brute = brute * (RationalMatrix.identity(n) + q_matrix(n, k) * s)
                    assert partial_product_closed_form(n, k, s) == brute


def test_criterion_05_minimal_example_series():
    with criterion(5, "minimal-example series coefficients vs zeta forms", 10.0):
        # balanced case: mu_{2j}(1,2) = -4(-1)^j (1-2^{-2j}) zeta(2j), j=1..8
        terms0 = minimal_magnus_terms(MinimalPair.of_pi(0, 1), 16)
        for j in range(1, 9):
            got = terms0[2 * j - 1][0, 1]
            want = -((-1.0) ** j) * 4.0 * (1.0 - 2.0 ** (-2 * j)) * float(zeta_even(j))
            assert abs(got - want) <= 1e-10, (j, got, want)
        # totally unbalanced cases: -/+pi t, pi^2 t^2, +/-(-1)^j 2 pi zeta(2j) t^{2j+1}
        for sgn in (1, -1):
            terms = minimal_magnus_terms(MinimalPair.of_pi(sgn, 1), 14)
            assert abs(terms[0][0, 1] - (-sgn * math.pi)) <= 1e-10
            assert abs(terms[1][0, 1] - math.pi**2) <= 1e-10
            for j in range(1, 7):
                got = terms[2 * j][0, 1]
                want = sgn * (-1.0) ** j * 2.0 * math.pi * float(zeta_even(j))
                assert abs(got - want) <= 1e-10, (sgn, j, got, want)


def test_criterion_06_oscillation_limits():
    with criterion(6, "asymptote error bounded by fitted C * 2^-k, k=10..40", 30.0):
        for a_over_pi in (0, Fraction(1, 3), 1):
            pair = MinimalPair.of_pi(a_over_pi, 1)
            terms = minimal_magnus_terms(pair, 40)
            errs = {
                k: abs(terms[k - 1][0, 1] - minimal_term_asymptote(pair, k)[0, 1])
                for k in range(10, 41)
            }
            fitted = max(errs[k] * 2.0**k for k in range(10, 21))
            assert fitted > 0
            for k in range(10, 41):
                assert errs[k] <= fitted * 2.0**-k * (1 + 1e-9), (a_over_pi, k)
            even_mag = abs(minimal_term_asymptote(pair, 12)[0, 1])
            odd_mag = abs(minimal_term_asymptote(pair, 13)[0, 1])
            assert max(even_mag, odd_mag) > 0


def test_criterion_07_closed_form_log_round_trip():
    with criterion(7, "exp of closed-form log equals Rexp of scaled pair", 5.0):
        samples = [
            (0, 1),
            (Fraction(1, 3), Fraction(1, 2)),
            (Fraction(-1, 2), 2),
            (1, 1),
            (-1, Fraction(3, 4)),
        ]
        for a_over_pi, eps in samples:
            pair = MinimalPair.of_pi(a_over_pi, eps)
            for t in (0.1, 0.3, 0.7):
                lhs = exp_float(minimal_log_closed_form(pair, t))
                rhs = rexp_float(minimal_measure(pair).scale_durations(Fraction(t)))
                assert lhs.approx_eq(rhs, 1e-9), (a_over_pi, eps, t)


def test_criterion_08_lambda3():
    with criterion(8, "solve_lambda(pi) = 0.0588740902 within 1e-8, above 1/17", 1.0):
        lam3 = solve_lambda(math.pi)
        assert abs(lam3 - 0.0588740902) <= 1e-8
        assert lam3 > 1 / 17


def test_criterion_09_rogers_chain():
    with criterion(9, "covering chain r1<=r2<r3<r4 and closed form, n=3..10^4", 10.0):
        for n in range(3, 10_001):
            r1 = rogers_theta(n, "r1")  # cross-checks Lambert form internally
            r2 = rogers_theta(n, "r2")
            r3 = rogers_theta(n, "r3")
            r4 = rogers_theta(n, "r4")
            assert r1 <= r2 < r3 < r4, n


def test_criterion_10_gain_bound_dominance():
    with criterion(10, "exact |weighted second term| <= gain bound, 10^3 trials", 30.0):
        summary = gain_bound_trials(
            1000, 0, [Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)]
        )
        assert summary["violations"] == 0
        assert summary["all_dominated"]


def test_criterion_11_radius_sanity():
    with criterion(11, "radius in (2, c_upper], weight bound nondecreasing", 5.0):
        lams = [lambda_lower_bound(d) for d in range(3, 201)]
        assert all(a <= b for a, b in zip(lams, lams[1:]))
        for n in range(3, 201):
            r = magnus_radius(n)
            assert r > 2, n
            if n >= 9:
                assert r <= c_upper_bound(n), n


def _random_upper_triangular(rng):
    while True:
        m = RationalMatrix(
            [
                [
                    Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                    Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                ],
                [0, Fraction(rng.randint(-9, 9), rng.randint(1, 9))],
            ]
        )
        if op_norm(m, NormKind.L1_OP) != 0:
            return m


def _random_convergent_measure(rng):
    # generic upper-triangular step measure rescaled to cumulative norm 0.9 pi
    while True:
        k = rng.randint(2, 4)
        steps = [
            (_random_upper_triangular(rng), Fraction(rng.randint(1, 4), rng.randint(1, 4)))
            for _ in range(k)
        ]
        phi = StepMeasure.of(steps)
        if not weighted_second_term(phi, Fraction(1, 2)).is_zero():
            total = cumulative_norm(phi, NormKind.L1_OP)
            return phi.scale_durations(Fraction(0.9 * math.pi) / total)


def test_criterion_12_convergent_empirics():
    with criterion(12, "even-term decay at cumulative norm 0.9 pi, 100 measures", 60.0):
        rng = random.Random(2)
        for _ in range(100):
            phi = _random_convergent_measure(rng)
            assert float(cumulative_norm(phi, NormKind.L1_OP)) == pytest.approx(
                0.9 * math.pi, rel=1e-12
            )
            norms = [op_norm(t, NormKind.L1_OP) for t in magnus_terms(phi, 32).terms]
            for k in range(10, 31, 2):
                assert norms[k + 1] < norms[k - 1], k


def test_criterion_13_c_infinity_profile():
    with criterion(13, "profile symmetry, midpoint convexity, quadratic minorant", 5.0):
        grid = [i / 1024 for i in range(1, 1024)]
        vals = [c_infinity(lam) for lam in grid]
        half = {}
        for lam, v in zip(grid, vals):
            assert v == c_infinity(1.0 - lam)  # exact symmetry
            assert v >= 2.0 + (8.0 / 3.0) * (lam - 0.5) ** 2
        for s in range(2, 2047):
            half[s] = c_infinity(s / 2048)
        m = len(grid)
        for i in range(m):
            vi = vals[i]
            for j in range(i, m):
                assert half[i + j + 2] <= (vi + vals[j]) / 2.0 + 1e-12
