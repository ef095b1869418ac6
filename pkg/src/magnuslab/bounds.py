"""Convergence-side calculators: the covering-density chain, the generating
radius profile C_inf(lam), certified lower bounds for the critical weight
Lambda_d, the second-order gain bound, and the dimension-dependent Magnus
convergence radius.

All bounds here are one-sided and certified: where an exact quantity is
unknowable (the true critical cumulative norm of a d-dimensional algebra),
the best provable bound is substituted in the direction that keeps the
result a valid convergence radius.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DomainError, MagnusLabError
from .linalg import NormKind, RationalMatrix, as_fraction, op_norm
from .measures import StepMeasure, weighted_second_term
from .series import lambert_w_minus1

THETA_VARIANTS = ("r1", "r2", "r3", "r4")


# ---------------------------------------------------------------------------
# radius profile in the weight lam


def c_infinity(lam: float) -> float:
    """Radius profile 2 artanh(1-2 lam)/(1-2 lam) = log((1-lam)/lam)/(1-2 lam).

    Strictly convex on (0, 1), symmetric under lam -> 1 - lam (evaluated
    symmetrically, so the symmetry is exact), minimum 2 at lam = 1/2 and
    +inf at the endpoints.  Near the minimum the artanh power series is used
    to avoid the 0/0 cancellation.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError("lam must lie in [0, 1]")
    if lam == 0.0 or lam == 1.0:
        return math.inf
    u = abs(1.0 - 2.0 * lam)
    if u < 1e-3:
        u2 = u * u
        return 2.0 * (1.0 + u2 / 3.0 + u2 * u2 / 5.0 + u2 * u2 * u2 / 7.0)
    return math.log((1.0 + u) / (1.0 - u)) / u


def solve_lambda(v: float) -> float:
    """The unique lam in (0, 1/2] with c_infinity(lam) = v, for v >= 2.

    Bisection on (0, 1/2], where the profile is strictly decreasing.
    """
    if v < 2.0:
        raise DomainError("the profile never drops below 2")
    if v == 2.0:
        return 0.5
    lo = 0.25
    while c_infinity(lo) < v:
        lo /= 2.0
        if lo < 1e-300:
            raise DomainError(f"no weight reaches {v}")
    hi = 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if c_infinity(mid) > v:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(hi, 1e-6):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class LambdaProfile:
    """A weight lam together with its radius c_inf = c_infinity(lam)."""

    lam: float
    c_inf: float

    @classmethod
    def at(cls, lam: float) -> "LambdaProfile":
        return cls(lam, c_infinity(lam))


# ---------------------------------------------------------------------------
# counterexample-side upper bound and the critical-weight lower bound


def c_upper_bound(d: int) -> float:
    """Upper bound on the critical cumulative norm of a d-dimensional real
    algebra: pi for d = 3, min(pi, 2 + 2/(isqrt(d) - 1)) for d >= 4.

    The second branch comes from the parabolic counterexamples packed into
    dimension n^2 <= d; it beats pi only from d = 9 on.
    """
    if d < 3:
        raise DomainError("d must be >= 3")
    if d == 3:
        return math.pi
    root = math.isqrt(d)
    return min(math.pi, 2.0 + 2.0 / (root - 1))


_LAMBDA3 = None


def _lambda3() -> float:
    global _LAMBDA3
    if _LAMBDA3 is None:
        _LAMBDA3 = solve_lambda(math.pi)
    return _LAMBDA3


def lambda_lower_bound(d: int) -> float:
    """Certified lower bound on the critical weight Lambda_d in (0, 1/2].

    Inverts the radius profile at the counterexample-side upper bound (the
    profile is decreasing, so an upper bound on the critical norm gives a
    lower bound on the weight).  For d >= 25 the closed-form minorant
    (1 - sqrt(3/(isqrt(d)-1)))/2 is also taken; the result never drops below
    the d = 3 value.
    """
    if d < 3:
        raise DomainError("d must be >= 3")
    best = solve_lambda(c_upper_bound(d))
    if d >= 25:
        best = max(best, 0.5 * (1.0 - math.sqrt(3.0 / (math.isqrt(d) - 1))))
    return max(best, _lambda3())


# ---------------------------------------------------------------------------
# covering-density chain


def _theta_r1_closed_form(n: int) -> float:
    w = lambert_w_minus1(-1.0 / n)
    return -n * w * (1.0 - 1.0 / (n * w)) ** (n + 1)


def _theta_r1_minimized(n: int) -> float:
    # golden-section for min over eta in (0, 1/n) of (1+eta)^n (1+n log(1/eta))
    def f(eta):
        return (1.0 + eta) ** n * (1.0 + n * math.log(1.0 / eta))

    u = math.log(n) - 1.0
    lo = 1.0 / (n * (1.5 + math.sqrt(2.0 * u) + u))
    hi = (1.0 - 1e-9) / n
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > 1e-10 * b:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return f(0.5 * (a + b))


def rogers_theta(n: int, variant: str = "r1") -> float:
    """Dimension-dependent covering-density bound, by increasing looseness:

    r1: min over eta in (0, 1/n) of (1+eta)^n (1+n log(1/eta)), evaluated
        both through the Lambert W_{-1} closed form and by direct
        golden-section minimization (the two must agree to 1e-8);
    r2: the same expression at eta = 1/(n log n);
    r3: n log n + n log log n + 2n + 1;
    r4: n log n + n log log n + 5n (the much quoted form).
    """
    if n < 3:
        raise DomainError("n must be >= 3")
    variant = variant.lower()
    if variant == "r1":
        closed = _theta_r1_closed_form(n)
        direct = _theta_r1_minimized(n)
        if abs(closed - direct) > 1e-8 * max(abs(closed), 1.0):
            raise MagnusLabError(
                f"covering bound mismatch at n={n}: {closed!r} vs {direct!r}"
            )
        return closed
    ln = math.log(n)
    lln = math.log(ln)
    if variant == "r2":
        eta = 1.0 / (n * ln)
        return (1.0 + eta) ** n * (1.0 + n * math.log(n * ln))
    if variant == "r3":
        return n * ln + n * lln + 2.0 * n + 1.0
    if variant == "r4":
        return n * ln + n * lln + 5.0 * n
    raise DomainError(f"unknown variant {variant!r}; expected one of {THETA_VARIANTS}")


def covering_count(n: int, r: float) -> float:
    """Upper bound (1 + 1/r)^n theta_n on the number of translates of rH
    needed to cover a centrally symmetric convex body H, 0 < r < 1."""
    if n < 3:
        raise DomainError("n must be >= 3")
    if not 0.0 < r < 1.0:
        raise DomainError("r must lie in (0, 1)")
    return (1.0 + 1.0 / r) ** n * rogers_theta(n, "r1")


# ---------------------------------------------------------------------------
# second-order gain and the convergence radius


def gain_bound(n: int, lam: float, omega: float, variant: str = "r1",
               optimal_r: bool = False) -> float:
    """Upper bound on the norm of the weighted second-order integral of any
    measure of cumulative norm omega over an algebra of real dimension n:

        (omega^2/2) (1 - (2^{1-n}/n) ((1-2/n)/e) (1/theta_n) min(lam, 1-lam)).

    The default follows the covering ratio r = 1 - 2/n of the displayed
    bound; ``optimal_r`` instead maximizes the gain (1-r)/(1+1/r)^n over r,
    at r = (sqrt(n^2+6n+1) - n - 1)/2, giving a slightly sharper valid bound.
    """
    if n < 3:
        raise DomainError("n must be >= 3")
    if not 0.0 <= lam <= 1.0:
        raise DomainError("lam must lie in [0, 1]")
    if omega < 0.0:
        raise DomainError("omega must be nonnegative")
    theta = rogers_theta(n, variant)
    if optimal_r:
        r = (math.sqrt(n * n + 6.0 * n + 1.0) - n - 1.0) / 2.0
        gain = (1.0 - r) / (1.0 + 1.0 / r) ** n / theta * min(lam, 1.0 - lam)
    else:
        gain = (
            2.0 ** (1 - n) / n * ((1.0 - 2.0 / n) / math.e) / theta * min(lam, 1.0 - lam)
        )
    return omega * omega / 2.0 * (1.0 - gain)


def delay(r: float) -> float:
    """Delay collected by a unit-norm prefix with second-order gain r:
    r/(4 - r), so that 2 + 2 delay(r) = 2/(1 - r/4)."""
    if not 0.0 < r < 4.0:
        raise DomainError("r must lie in (0, 4)")
    return r / (4.0 - r)


def _gain_rate(n: int, lam_lower: float, theta: float):
    # the internal gain r := (1/2)(2^{1-n}/n)((1-2/n)/e)(Lambda_n/theta_n)
    return 0.5 * 2.0 ** (1 - n) / n * ((1.0 - 2.0 / n) / math.e) * lam_lower / theta


def magnus_radius(n: int, variant: str = "r1") -> mpmath.mpf:
    """Certified convergence radius 2/(1 - (2^{-2-n}/n)((1-2/n)/e) L_n/theta_n)
    with the critical weight replaced by its certified lower bound (the radius
    is increasing in the weight, so the result remains valid; a looser
    covering variant only shrinks it toward 2).

    Returned as an mpmath real: the excess over 2 shrinks like 2^{-n} and
    would round to exactly 2 in double precision for moderate n already.
    """
    if n < 3:
        raise DomainError("n must be >= 3")
    theta = rogers_theta(n, variant)
    lam = lambda_lower_bound(n)
    with mpmath.workdps(max(30, int(0.31 * n) + 30)):
        q = (
            mpmath.mpf(2) ** (-2 - n)
            / n
            * ((1 - mpmath.mpf(2) / n) / mpmath.e)
            * (mpmath.mpf(lam) / theta)
        )
        return 2 / (1 - q)


@dataclass(frozen=True)
class DimensionProfile:
    """Per-dimension bundle: covering-bound chain, counterexample-side upper
    bound, certified weight lower bound, convergence radius and internal gain.
    """

    d: int
    theta_r1: float
    theta_r2: float
    theta_r3: float
    theta_r4: float
    c_upper: float
    lambda_lower: float
    radius: mpmath.mpf
    delay_r: float

    def __post_init__(self):
        ok = (
            self.theta_r1 <= self.theta_r2 < self.theta_r3 < self.theta_r4
            and 2 < self.radius <= self.c_upper
            and 0.0 < self.lambda_lower <= 0.5
        )
        if not ok:
            raise MagnusLabError(f"inconsistent dimension profile at d={self.d}")

    def to_json(self, digits: int = 15, variant: str = "r1") -> dict:
        def s(x):
            if isinstance(x, mpmath.mpf):
                return mpmath.nstr(x, digits)
            return format(float(x), f".{digits}g")

        return {
            "d": self.d,
            "theta_variant": variant,
            "theta_r1": s(self.theta_r1),
            "theta_r2": s(self.theta_r2),
            "theta_r3": s(self.theta_r3),
            "theta_r4": s(self.theta_r4),
            "c_upper": s(self.c_upper),
            "lambda_lower": s(self.lambda_lower),
            "radius": s(self.radius),
            "radius_excess": mpmath.nstr(self.radius - 2, max(digits // 2, 6)),
            "delay_r": s(self.delay_r),
        }


def dimension_profile(d: int, variant: str = "r1") -> DimensionProfile:
    """Populate the full per-dimension bundle (invariants are validated).

    ``variant`` selects the covering bound fed into the radius and the gain
    rate; the sharpest one (r1) is the default.
    """
    if d < 3:
        raise DomainError("d must be >= 3")
    theta = rogers_theta(d, variant)
    lam = lambda_lower_bound(d)
    return DimensionProfile(
        d=d,
        theta_r1=rogers_theta(d, "r1"),
        theta_r2=rogers_theta(d, "r2"),
        theta_r3=rogers_theta(d, "r3"),
        theta_r4=rogers_theta(d, "r4"),
        c_upper=c_upper_bound(d),
        lambda_lower=lam,
        radius=magnus_radius(d, variant),
        delay_r=_gain_rate(d, lam, theta),
    )


# ---------------------------------------------------------------------------
# seeded gain-bound trials (exact left-hand side against the float bound)


def _random_unit_density(rng: random.Random) -> RationalMatrix:
    while True:
        a = RationalMatrix(
            [
                [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(2)]
                for _ in range(2)
            ]
        )
        norm = op_norm(a, NormKind.L1_OP)
        if norm != 0:
            return a * (1 / norm)


def gain_bound_trials(trials: int, seed: int, lambdas, optimal_r: bool = False) -> dict:
    """Seeded random step measures over 2x2 real matrices (algebra dimension
    4) with exactly unit-l1-norm densities; checks that the exact norm of the
    weighted second-order integral never exceeds gain_bound(4, lam, omega).

    Returns a summary dict with the worst ratio and any violations.
    """
    if trials < 1:
        raise DomainError("at least one trial required")
    lambdas = [as_fraction(l) for l in lambdas]
    for lam in lambdas:
        if not 0 <= lam <= 1:
            raise DomainError("lam must lie in [0, 1]")
    rng = random.Random(seed)
    worst = 0.0
    violations = 0
    for _ in range(trials):
        k = rng.randint(2, 5)
        steps = [
            (_random_unit_density(rng), Fraction(rng.randint(1, 8), rng.randint(1, 8)))
            for _ in range(k)
        ]
        phi = StepMeasure.of(steps)
        omega = phi.total_duration()  # unit-norm densities: cumulative norm
        for lam in lambdas:
            lhs = op_norm(weighted_second_term(phi, lam), NormKind.L1_OP)
            rhs = gain_bound(4, float(lam), float(omega), optimal_r=optimal_r)
            if lhs > as_fraction(rhs):
                violations += 1
            ratio = float(lhs) / rhs if rhs else math.inf
            worst = max(worst, ratio)
    return {
        "trials": trials,
        "seed": seed,
        "lambdas": [str(l) for l in lambdas],
        "dimension": 4,
        "optimal_r": optimal_r,
        "max_ratio": worst,
        "violations": violations,
        "all_dominated": violations == 0,
    }
