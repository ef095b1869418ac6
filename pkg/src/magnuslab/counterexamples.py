"""Constructors and exact certificates for the two divergence families:
the 2x2 upper-triangular minimal pairs and the n x n parabolic step family.

Minimal pairs carry the angle as a rational multiple of pi whenever possible,
so that the coefficients of their Magnus terms are exact rationals times
powers of pi; otherwise the entries fall back to exact binary rationals of
the float values.  The parabolic family is exact rational throughout, and
divergence is certified by a parity argument on the exact geometric
multiplicity of the eigenvalue -1 (no Jordan forms are ever computed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .errors import (
    CertificateFailed,
    DomainError,
    IndexOutOfRange,
    PoleError,
    RatioUnreachable,
)
from .linalg import (
    FloatMatrix,
    NormKind,
    RationalMatrix,
    as_fraction,
    op_norm,
    rank_exact,
)
from .measures import MagnusTermSequence, StepMeasure, magnus_terms, rexp_exact


# ---------------------------------------------------------------------------
# minimal pairs


@dataclass(frozen=True)
class MinimalPair:
    """Angle alpha in [-pi, pi] and a nonzero coupling eps.

    ``alpha_over_pi`` is the exact angle divided by pi when known (it is
    inferred automatically for alpha in {0, +pi, -pi}); ``eps_exact`` is the
    exact binary rational of eps.
    """

    alpha: float
    eps: float
    alpha_over_pi: Optional[Fraction] = None
    eps_exact: Optional[Fraction] = None

    def __post_init__(self):
        if not -math.pi <= self.alpha <= math.pi:
            raise DomainError("alpha must lie in [-pi, pi]")
        if self.eps == 0:
            raise DomainError("eps must be nonzero")
        if self.alpha_over_pi is None:
            hits = {0.0: Fraction(0), math.pi: Fraction(1), -math.pi: Fraction(-1)}
            if self.alpha in hits:
                object.__setattr__(self, "alpha_over_pi", hits[self.alpha])
        elif not -1 <= self.alpha_over_pi <= 1:
            raise DomainError("alpha/pi must lie in [-1, 1]")
        if self.eps_exact is None:
            object.__setattr__(self, "eps_exact", Fraction(self.eps))

    @classmethod
    def of_pi(cls, alpha_over_pi, eps) -> "MinimalPair":
        """Build from alpha = (p/q) * pi with exact p/q and exact eps."""
        a = as_fraction(alpha_over_pi)
        e = as_fraction(eps)
        return cls(float(a) * math.pi, float(e), alpha_over_pi=a, eps_exact=e)

    @property
    def exact(self) -> bool:
        """True when the angle is a known rational multiple of pi."""
        return self.alpha_over_pi is not None

    @property
    def totally_unbalanced(self) -> Optional[int]:
        """+1 at alpha = +pi, -1 at alpha = -pi, None inside."""
        if self.alpha_over_pi == 1:
            return 1
        if self.alpha_over_pi == -1:
            return -1
        return None


def minimal_pair_matrices(p: MinimalPair) -> Tuple[FloatMatrix, FloatMatrix]:
    """The two upper-triangular step densities of the pair, as floats:
    M1 = [[(pi-a)/2, -(pi+a)e/2], [0, -(pi-a)/2]] and
    M2 = [[(pi+a)/2, (pi-a)e/2], [0, -(pi+a)/2]].
    """
    a, e = p.alpha, p.eps
    m1 = FloatMatrix([[(math.pi - a) / 2, -(math.pi + a) * e / 2], [0.0, -(math.pi - a) / 2]])
    m2 = FloatMatrix([[(math.pi + a) / 2, (math.pi - a) * e / 2], [0.0, -(math.pi + a) / 2]])
    return m1, m2


def minimal_pair_scaled(p: MinimalPair) -> Tuple[RationalMatrix, RationalMatrix]:
    """The pair divided by pi, exact: requires a pi-rational angle."""
    if not p.exact:
        raise DomainError("alpha is not a known rational multiple of pi")
    a = p.alpha_over_pi
    e = p.eps_exact
    r1 = RationalMatrix([[(1 - a) / 2, -(1 + a) * e / 2], [0, -(1 - a) / 2]])
    r2 = RationalMatrix([[(1 + a) / 2, (1 - a) * e / 2], [0, -(1 + a) / 2]])
    return r1, r2


def minimal_measure(p: MinimalPair) -> StepMeasure:
    """The two-step measure M1 on [0,1), M2 on [1,2) with float-exact entries."""
    m1, m2 = minimal_pair_matrices(p)
    r1 = RationalMatrix([[Fraction(v) for v in row] for row in m1.array.tolist()])
    r2 = RationalMatrix([[Fraction(v) for v in row] for row in m2.array.tolist()])
    return StepMeasure.of([(r1, 1), (r2, 1)])


def minimal_measure_scaled(p: MinimalPair) -> StepMeasure:
    """The pi-scaled two-step measure; its Magnus terms are mu_k / pi^k."""
    r1, r2 = minimal_pair_scaled(p)
    return StepMeasure.of([(r1, 1), (r2, 1)])


def minimal_magnus_scaled(p: MinimalPair, order: int) -> MagnusTermSequence:
    """Exact rational Magnus terms of the pi-scaled pair (mu_k / pi^k)."""
    return magnus_terms(minimal_measure_scaled(p), order)


def minimal_magnus_terms(p: MinimalPair, order: int) -> list[FloatMatrix]:
    """mu_1..mu_K of the pair as floats.

    Uses the exact pi-scaled route when available (each scaled term is
    multiplied back by pi^k), the float-exact route otherwise.
    """
    if p.exact:
        scaled = minimal_magnus_scaled(p, order)
        out = []
        for k, t in enumerate(scaled.terms, start=1):
            out.append(FloatMatrix(t.to_array() * math.pi**k))
        return out
    terms = magnus_terms(minimal_measure(p), order)
    return [t.to_float() for t in terms.terms]


def minimal_log_closed_form(p: MinimalPair, t: float) -> FloatMatrix:
    """Closed form of the logarithm of the t-scaled ordered exponential.

    Diagonal (pi t, -pi t); the off-diagonal entry is the sinh/exp expression
    for |alpha| < pi and -/+ pi t eps beta(+/- 2 pi t) in the totally
    unbalanced cases, with beta(x) = x/(e^x - 1).  At t = 0 the series value
    (the zero matrix) is returned.
    """
    if t == 0.0:
        return FloatMatrix([[0.0, 0.0], [0.0, 0.0]])
    e = p.eps
    sign = p.totally_unbalanced
    if sign is not None:
        x = sign * 2.0 * math.pi * t
        beta = x / math.expm1(x)
        off = -sign * math.pi * t * e * beta
    else:
        a = p.alpha
        sh = math.sinh(math.pi * t)
        if sh == 0.0 or not math.isfinite(sh):
            raise PoleError(f"cannot evaluate the closed form at t={t}")
        pi2, a2 = math.pi**2, a * a
        num = (pi2 + a2) * (math.cosh(math.pi * t) - math.exp(-t * a)) - 2.0 * a * math.pi * sh
        off = t * e * math.pi * num / ((pi2 - a2) * sh)
    return FloatMatrix([[math.pi * t, off], [0.0, -math.pi * t]])


def minimal_term_asymptote(p: MinimalPair, k: int) -> FloatMatrix:
    """Oscillatory leading term of mu_k for k >= 2 (strictly upper triangular).

    For |alpha| < pi the off-diagonal magnitude limits to
    2 (pi^2 + a^2)(1 + cos a) |eps| / (pi^2 - a^2) along even k and to the
    sin-a analogue along odd k; in the totally unbalanced cases the even
    limit is 0 and the odd one is 2 pi |eps|.  Signs alternate with period 4.
    """
    if k < 2:
        raise DomainError("asymptote defined for k >= 2")
    e = p.eps
    sign = p.totally_unbalanced
    if sign is not None:
        if k % 2 == 0:
            off = 0.0
        else:
            off = sign * (-1.0) ** ((k - 1) // 2) * 2.0 * math.pi * e
    else:
        a = p.alpha
        pi2, a2 = math.pi**2, a * a
        if k % 2 == 0:
            off = -((-1.0) ** (k // 2)) * 2.0 * (pi2 + a2) * (1.0 + math.cos(a)) * e / (pi2 - a2)
        else:
            off = -((-1.0) ** ((k + 1) // 2)) * 2.0 * (pi2 + a2) * math.sin(a) * e / (pi2 - a2)
    return FloatMatrix([[0.0, off], [0.0, 0.0]])


def _norm_ratio(alpha: float, eps: float, kind: NormKind) -> float:
    m1, m2 = minimal_pair_matrices(MinimalPair(alpha, eps))
    return float(op_norm(m1, kind)) / float(op_norm(m2, kind))


def find_alpha_for_ratio(rho: float, eps: float, kind: NormKind = NormKind.L1_OP) -> float:
    """Angle alpha in [-pi, pi] with ||M1||/||M2|| = rho to within 1e-9.

    The ratio is continuous in alpha and spans the closed interval between
    its values at -pi and +pi; outside that range RatioUnreachable is raised
    (shrink eps to widen the range).  Bisection on a bracketing subinterval,
    located by a grid scan when the ratio is not monotone.
    """
    if rho <= 0:
        raise DomainError("rho must be positive")
    if eps == 0:
        raise DomainError("eps must be nonzero")
    if abs(_norm_ratio(0.0, eps, kind) - rho) <= 1e-9:
        return 0.0
    grid = [-math.pi + i * (2.0 * math.pi / 256) for i in range(257)]
    grid[0], grid[-1] = -math.pi, math.pi
    vals = [_norm_ratio(a, eps, kind) - rho for a in grid]
    lo_val = min(v + rho for v in vals)
    hi_val = max(v + rho for v in vals)
    if not lo_val * (1 - 1e-12) <= rho <= hi_val * (1 + 1e-12):
        raise RatioUnreachable(
            f"ratio {rho} outside achievable range [{lo_val:.6g}, {hi_val:.6g}]"
        )
    bracket = None
    for i in range(256):
        if vals[i] == 0.0:
            return grid[i]
        if vals[i] * vals[i + 1] <= 0.0:
            bracket = (grid[i], grid[i + 1], vals[i])
            break
    if bracket is None:
        raise RatioUnreachable(f"no bracketing interval found for ratio {rho}")
    a_lo, a_hi, f_lo = bracket
    for _ in range(200):
        mid = 0.5 * (a_lo + a_hi)
        f_mid = _norm_ratio(mid, eps, kind) - rho
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0.0:
            a_hi = mid
        else:
            a_lo, f_lo = mid, f_mid
        if a_hi - a_lo <= 1e-13:
            break
    alpha = 0.5 * (a_lo + a_hi)
    if abs(_norm_ratio(alpha, eps, kind) - rho) > 1e-9:
        raise RatioUnreachable(f"bisection did not reach ratio {rho}")
    return alpha


# ---------------------------------------------------------------------------
# parabolic family


@dataclass(frozen=True)
class ParabolicFamily:
    """Size n >= 2 and the scalar step weight s of the ordered product."""

    n: int
    s: Fraction

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n must be >= 2")
        object.__setattr__(self, "s", as_fraction(self.s))


def q_matrix(n: int, u: int) -> RationalMatrix:
    """Row u carries sgn(j - u) for j = 1..n; every other row is zero.

    These rank-one sign matrices square to zero exactly.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    if not 1 <= u <= n:
        raise IndexOutOfRange(f"u must lie in 1..{n}")
    nums = [0] * (n * n)
    for j in range(1, n + 1):
        if j != u:
            nums[(u - 1) * n + (j - 1)] = 1 if j > u else -1
    return RationalMatrix._raw(n, nums, 1)


def psi_measure(n: int) -> StepMeasure:
    """The n-step measure with densities (2/(n-1)) Q_k, k = 1..n, duration 1.

    Its cumulative l1 operator norm is 2n/(n-1); its Magnus expansion is
    certified divergent by certify_divergence.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    scale = Fraction(2, n - 1)
    return StepMeasure.of([(q_matrix(n, k) * scale, 1) for k in range(1, n + 1)])


def partial_product_closed_form(n: int, k: int, s) -> RationalMatrix:
    """Closed form of (Id + s Q_1)...(Id + s Q_k) as a 2x2 block matrix
    [[A + B, C], [0, Id_{n-k}]], exact.

    With q = s + 1: A is k x k upper triangular with q on the diagonal and
    q^{j-i+1} - q^{j-i-1} above it; row i of B is constant q^{k-i} - q^{k-i+1}
    and row i of C is its negative.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 1 <= k <= n:
        raise IndexOutOfRange(f"k must lie in 1..{n}")
    s = as_fraction(s)
    q = s + 1
    pw = [q**m for m in range(k + 2)]
    rows = []
    for i in range(1, k + 1):
        row = []
        for j in range(1, k + 1):
            if i < j:
                a = pw[j - i + 1] - pw[j - i - 1]
            elif i == j:
                a = q
            else:
                a = Fraction(0)
            row.append(a + pw[k - i] - pw[k - i + 1])
        row.extend([pw[k - i + 1] - pw[k - i]] * (n - k))
        rows.append(row)
    for i in range(k + 1, n + 1):
        rows.append([Fraction(int(i == j)) for j in range(1, n + 1)])
    return RationalMatrix(rows)


def product_matrix(f: ParabolicFamily) -> RationalMatrix:
    """Full ordered product (Id + s Q_1)...(Id + s Q_n), exact."""
    return partial_product_closed_form(f.n, f.n, f.s)


@dataclass(frozen=True)
class DivergenceCertificate:
    """Exact divergence certificate for the n-step parabolic measure.

    ``eigencheck``: the all-ones vector maps to its negative under the
    ordered exponential P.  ``gm_minus_one``: exact geometric multiplicity of
    the eigenvalue -1.  ``parity_verdict``: true when that multiplicity is
    odd, which rules out P being the exponential of any real matrix, hence
    rules out a convergent Magnus sum.  ``invariance_check``: P preserves the
    quadratic form Id - v v^T / n.
    """

    n: int
    eigencheck: bool
    gm_minus_one: int
    parity_verdict: bool
    invariance_check: bool
    rank_p_plus_i: int

    def __post_init__(self):
        if self.parity_verdict != (self.gm_minus_one % 2 == 1):
            raise CertificateFailed("parity verdict inconsistent with multiplicity")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "eigencheck": self.eigencheck,
            "gm_minus_one": self.gm_minus_one,
            "parity_verdict": self.parity_verdict,
            "invariance_check": self.invariance_check,
            "rank_P_plus_I": self.rank_p_plus_i,
        }


def certify_divergence(n: int) -> DivergenceCertificate:
    """Build P = Rexp(psi_n) exactly and certify divergence by parity.

    Checks, all in exact arithmetic: P v = -v for the all-ones v; the
    geometric multiplicity of -1 via the rank of P + Id; preservation of
    Id - v v^T / n.  Raises CertificateFailed if the eigencheck fails (that
    would be an implementation bug, never expected).
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    p = rexp_exact(psi_measure(n))
    ones = [Fraction(1)] * n
    eigencheck = p.mul_vector(ones) == tuple(Fraction(-1) for _ in range(n))
    if not eigencheck:
        raise CertificateFailed(f"all-ones vector is not a -1 eigenvector at n={n}")
    rank = rank_exact(p + RationalMatrix.identity(n))
    gm = n - rank
    form = RationalMatrix.identity(n) - RationalMatrix(
        [[Fraction(1, n)] * n for _ in range(n)]
    )
    invariant = p.transpose() * form * p == form
    return DivergenceCertificate(
        n=n,
        eigencheck=eigencheck,
        gm_minus_one=gm,
        parity_verdict=gm % 2 == 1,
        invariance_check=invariant,
        rank_p_plus_i=rank,
    )
