"""Truncated formal power series with rational matrix coefficients, plus the
scalar special functions feeding them: Bernoulli numbers, even zeta values,
the x/(e^x - 1) expansion and the W_{-1} branch of the Lambert function.

Series arithmetic is exact; floats appear only in zeta values (carried as
high-precision mpmath reals) and in the Lambert function.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

import mpmath

from . import _backend
from .errors import BadConstantTerm, DomainError, SizeMismatch
from .linalg import RationalMatrix

#: working precision (significant digits) for stored zeta values
ZETA_DPS = 40


class MatrixPowerSeries:
    """Polynomial in t of degree <= order with RationalMatrix coefficients.

    Arithmetic never reads beyond the truncation order.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise SizeMismatch("a series needs at least the constant coefficient")
        n = coeffs[0].n
        if any(c.n != n for c in coeffs):
            raise SizeMismatch("coefficient sizes differ")
        self.coeffs = coeffs
        self.order = len(coeffs) - 1

    @property
    def n(self):
        return self.coeffs[0].n

    def coefficient(self, k) -> RationalMatrix:
        return self.coeffs[k]

    def __eq__(self, other):
        if not isinstance(other, MatrixPowerSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"MatrixPowerSeries(order={self.order}, n={self.n})"


def _to_packed(s: MatrixPowerSeries):
    return [
        None if c.is_zero() else (list(c._num), c._den)
        for c in s.coeffs
    ]


def _from_packed(packed, n):
    coeffs = [
        RationalMatrix.zeros(n) if p is None else RationalMatrix._raw(n, p[0], p[1])
        for p in packed
    ]
    return MatrixPowerSeries(coeffs)


def _packed_add_scaled(acc_k, p_k, num, den):
    # acc_k + (num/den) * p_k on (nums, den) pairs; no normalization here
    nb, db = p_k
    tb = db * den
    tn = [v * num for v in nb]
    if acc_k is None:
        return tn, tb
    na, da = acc_k
    g = math.gcd(da, tb)
    lc = da // g * tb
    sa, sb = lc // da, lc // tb
    return [x * sa + y * sb for x, y in zip(na, tn)], lc


def series_exp(a: RationalMatrix, order: int) -> MatrixPowerSeries:
    """Exponential series of t*A truncated at the given order: A^j/j! exact."""
    if order < 1:
        raise DomainError("order must be a positive integer")
    n = a.n
    packed = [None] * (order + 1)
    packed[0] = (list(RationalMatrix.identity(n)._num), 1)
    num, den = list(a._num), a._den
    cur = packed[0]
    for j in range(1, order + 1):
        prod = _backend.imat_mul(cur[0], num, n)
        cur = _backend.normalize_packed(prod, cur[1] * den * j)
        if cur is None:
            break
        packed[j] = cur
    return _from_packed(packed, n)


def series_mul(x: MatrixPowerSeries, y: MatrixPowerSeries) -> MatrixPowerSeries:
    """Cauchy product truncated at min(order x, order y)."""
    if x.n != y.n:
        raise SizeMismatch(f"coefficient size {x.n} vs {y.n}")
    order = min(x.order, y.order)
    ca = _to_packed(x)[: order + 1]
    cb = _to_packed(y)[: order + 1]
    packed = _backend.series_mul_packed(ca, cb, x.n, order)
    return _from_packed(packed, x.n)


def series_log(x: MatrixPowerSeries) -> MatrixPowerSeries:
    """Logarithm sum_{m>=1} (-1)^{m+1} (X - Id)^m / m, truncated, exact.

    The constant coefficient must be the identity.
    """
    n = x.n
    order = x.order
    if x.coeffs[0] != RationalMatrix.identity(n):
        raise BadConstantTerm("constant coefficient must be the identity")
    y = _to_packed(x)
    y[0] = None  # X - Id
    acc = [None] * (order + 1)
    power = y
    for k in range(order + 1):
        if power[k] is not None:
            acc[k] = _packed_add_scaled(acc[k], power[k], 1, 1)
    for m in range(2, order + 1):
        power = _backend.series_mul_packed(power, y, n, order)
        if all(p is None for p in power):
            break
        sign = 1 if m % 2 else -1
        for k in range(m, order + 1):
            if power[k] is not None:
                acc[k] = _packed_add_scaled(acc[k], power[k], sign, m)
    acc = [None if p is None else _backend.normalize_packed(p[0], p[1]) for p in acc]
    return _from_packed(acc, n)


# ---------------------------------------------------------------------------
# scalar tables


class ScalarSeriesTable:
    """Memoized Bernoulli numbers (B_1 = -1/2 convention) and even zeta values.

    Thread-safe: the caches are guarded by a lock, and recomputation would be
    observationally identical anyway.
    """

    def __init__(self):
        self._bern = [Fraction(1)]
        self._zeta = {}
        self._lock = threading.Lock()

    def bernoulli(self, k: int) -> Fraction:
        if k < 0:
            raise DomainError("Bernoulli index must be nonnegative")
        with self._lock:
            while len(self._bern) <= k:
                m = len(self._bern)
                # sum_{j<=m} C(m+1, j) B_j = 0
                s = sum(math.comb(m + 1, j) * self._bern[j] for j in range(m))
                self._bern.append(Fraction(-s, m + 1))
            return self._bern[k]

    def zeta_even_no_pi(self, j: int) -> Fraction:
        """zeta(2j) / pi^(2j) as an exact rational."""
        if j < 1:
            raise DomainError("index must be >= 1")
        b = self.bernoulli(2 * j)
        return Fraction((-1) ** (j + 1) * 2 ** (2 * j - 1), math.factorial(2 * j)) * b

    def zeta_even(self, j: int):
        """zeta(2j) as a high-precision real (>= 30 significant digits)."""
        if j < 1:
            raise DomainError("index must be >= 1")
        with self._lock:
            cached = self._zeta.get(j)
        if cached is not None:
            return cached
        r = self.zeta_even_no_pi(j)
        with mpmath.workdps(ZETA_DPS):
            val = mpmath.mpf(r.numerator) / r.denominator * mpmath.pi ** (2 * j)
        with self._lock:
            self._zeta[j] = val
        return val


_TABLE = ScalarSeriesTable()


def bernoulli(k: int) -> Fraction:
    """Exact Bernoulli number B_k (convention B_1 = -1/2)."""
    return _TABLE.bernoulli(k)


def zeta_even(j: int):
    """zeta(2j), monotone decreasing to 1, as a high-precision real."""
    return _TABLE.zeta_even(j)


def zeta_even_no_pi(j: int) -> Fraction:
    """Exact rational zeta(2j) / pi^(2j)."""
    return _TABLE.zeta_even_no_pi(j)


def beta_series_coeff(k: int) -> Fraction:
    """Coefficient of x^k in x/(e^x - 1), i.e. B_k / k!."""
    if k < 0:
        raise DomainError("index must be nonnegative")
    return bernoulli(k) / math.factorial(k)


# ---------------------------------------------------------------------------
# Lambert W, branch -1


def lambert_w_minus1(x: float) -> float:
    """The branch W_{-1} on (-1/e, 0): the real solution w <= -1 of w e^w = x.

    Halley iteration from a branch-point or logarithmic initial guess; the
    defining residual converges to machine precision away from the branch
    point.  The float closest to -1/e itself is accepted and maps to -1.
    """
    if not (-1.0 / math.e - 1e-15 <= x < 0.0):
        raise DomainError("argument must lie in (-1/e, 0)")
    s2 = 2.0 * (1.0 + math.e * x)
    if s2 <= 0.0:
        return -1.0
    if s2 < 0.25:
        # branch-point expansion in s = sqrt(2(1 + e x))
        s = math.sqrt(s2)
        w = -1.0 - s - s2 / 3.0 - (11.0 / 72.0) * s2 * s
    else:
        l1 = math.log(-x)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        dw = f / denom
        w_new = w - dw
        if w_new > -1.0:
            w_new = (w - 1.0) / 2.0
        if w_new == w:
            break
        w = w_new
        if abs(dw) <= 1e-16 * abs(w):
            break
    return w
