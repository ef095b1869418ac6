"""Exact rational and floating dense linear algebra.

``RationalMatrix`` stores a flat tuple of integer numerators over a single
positive denominator, so products, sums, ranks and nilpotent exponentials
never round.  ``FloatMatrix`` wraps a read-only numpy array and mirrors the
operations that only make sense numerically (general exponentials, integral
logarithms, spectral norms).
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from math import gcd

import numpy as np
import scipy.linalg

from . import _backend
from .errors import DomainError, NotNilpotent, SingularPencil, SizeMismatch

#: condition-number threshold above which a quadrature resolvent is treated
#: as singular (spectrum touching the closed negative half-axis).
PENCIL_CONDITION_LIMIT = 1e12


class NormKind(enum.Enum):
    """Operator norms induced by the vector l^p norms, p in {1, 2, inf}.

    L1_OP is the maximum absolute column sum, LINF_OP the maximum absolute
    row sum, L2_OP the spectral norm.  All three are submultiplicative and
    assign 1 to the identity.
    """

    L1_OP = "l1"
    LINF_OP = "linf"
    L2_OP = "l2"


def as_fraction(x) -> Fraction:
    """Exact conversion of int/Fraction/str/float scalars.

    Floats convert to the exact binary rational they represent.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as an exact rational")


def _normalized(nums, den):
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        den = -den
        nums = [-v for v in nums]
    g = 0
    for v in nums:
        if v:
            g = gcd(g, v)
    if g == 0:
        return tuple(0 for _ in nums), 1
    g = gcd(g, den)
    if g != 1:
        nums = [v // g for v in nums]
        den //= g
    return tuple(nums), den


class RationalMatrix:
    """Dense square matrix with arbitrary-precision rational entries."""

    __slots__ = ("n", "_num", "_den")

    def __init__(self, rows):
        rows = [list(r) for r in rows]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise SizeMismatch("matrix must be square and nonempty")
        fracs = [as_fraction(v) for r in rows for v in r]
        den = 1
        for f in fracs:
            den = den // gcd(den, f.denominator) * f.denominator
        nums = [f.numerator * (den // f.denominator) for f in fracs]
        self.n = n
        self._num, self._den = _normalized(nums, den)

    @classmethod
    def _raw(cls, n, nums, den):
        # trusted path: flat integer numerators plus denominator
        self = object.__new__(cls)
        self.n = n
        self._num, self._den = _normalized(list(nums), den)
        return self

    @classmethod
    def identity(cls, n):
        nums = [0] * (n * n)
        for i in range(n):
            nums[i * n + i] = 1
        return cls._raw(n, nums, 1)

    @classmethod
    def zeros(cls, n):
        return cls._raw(n, [0] * (n * n), 1)

    @property
    def entries(self):
        """Entries as a tuple of tuples of Fraction."""
        n, d = self.n, self._den
        return tuple(
            tuple(Fraction(self._num[i * n + j], d) for j in range(n))
            for i in range(n)
        )

    def __getitem__(self, ij):
        i, j = ij
        return Fraction(self._num[i * self.n + j], self._den)

    def is_zero(self):
        return all(v == 0 for v in self._num)

    def _check_size(self, other):
        if self.n != other.n:
            raise SizeMismatch(f"size {self.n} vs {other.n}")

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.n == other.n and self._den == other._den and self._num == other._num

    def __hash__(self):
        return hash((self.n, self._den, self._num))

    def __neg__(self):
        return RationalMatrix._raw(self.n, [-v for v in self._num], self._den)

    def __add__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        self._check_size(other)
        da, db = self._den, other._den
        g = gcd(da, db)
        den = da // g * db
        sa, sb = den // da, den // db
        nums = [a * sa + b * sb for a, b in zip(self._num, other._num)]
        return RationalMatrix._raw(self.n, nums, den)

    def __sub__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalMatrix):
            self._check_size(other)
            nums = _backend.imat_mul(list(self._num), list(other._num), self.n)
            return RationalMatrix._raw(self.n, nums, self._den * other._den)
        try:
            f = as_fraction(other)
        except TypeError:
            return NotImplemented
        return RationalMatrix._raw(
            self.n, [v * f.numerator for v in self._num], self._den * f.denominator
        )

    def __rmul__(self, other):
        try:
            f = as_fraction(other)
        except TypeError:
            return NotImplemented
        return self * f

    def transpose(self):
        n = self.n
        nums = [self._num[j * n + i] for i in range(n) for j in range(n)]
        return RationalMatrix._raw(n, nums, self._den)

    def trace(self):
        n = self.n
        return Fraction(sum(self._num[i * n + i] for i in range(n)), self._den)

    def mul_vector(self, vec):
        """Matrix times column vector of rationals, exact."""
        if len(vec) != self.n:
            raise SizeMismatch("vector length mismatch")
        vec = [as_fraction(v) for v in vec]
        n = self.n
        return tuple(
            sum(Fraction(self._num[i * n + j], self._den) * vec[j] for j in range(n))
            for i in range(n)
        )

    def to_float(self):
        return FloatMatrix(self.to_array())

    def to_array(self):
        n, d = self.n, self._den
        return np.array(
            [[self._num[i * n + j] / d for j in range(n)] for i in range(n)],
            dtype=float,
        )

    def __repr__(self):
        return f"RationalMatrix({[[str(v) for v in row] for row in self.entries]})"


class FloatMatrix:
    """Dense square matrix of finite double-precision entries."""

    __slots__ = ("n", "_a")

    def __init__(self, rows):
        a = np.array(rows, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise SizeMismatch("matrix must be square and nonempty")
        if not np.all(np.isfinite(a)):
            raise DomainError("entries must be finite")
        a.setflags(write=False)
        self.n = a.shape[0]
        self._a = a

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @property
    def array(self):
        """Read-only view of the underlying array."""
        return self._a

    def __getitem__(self, ij):
        return float(self._a[ij])

    def __neg__(self):
        return FloatMatrix(-self._a)

    def __add__(self, other):
        if not isinstance(other, FloatMatrix):
            return NotImplemented
        return FloatMatrix(self._a + other._a)

    def __sub__(self, other):
        if not isinstance(other, FloatMatrix):
            return NotImplemented
        return FloatMatrix(self._a - other._a)

    def __mul__(self, other):
        if isinstance(other, FloatMatrix):
            if self.n != other.n:
                raise SizeMismatch(f"size {self.n} vs {other.n}")
            return FloatMatrix(self._a @ other._a)
        if isinstance(other, (int, float)):
            return FloatMatrix(self._a * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return FloatMatrix(self._a * float(other))
        return NotImplemented

    def approx_eq(self, other, tol=1e-12):
        return self.n == other.n and bool(np.max(np.abs(self._a - other._a)) <= tol)

    def __repr__(self):
        return f"FloatMatrix({self._a.tolist()})"


# ---------------------------------------------------------------------------
# norms


def _spectral_norm_2x2(a):
    # sigma_max = (sqrt(T + 2|det|) + sqrt(T - 2|det|)) / 2 with T = ||A||_F^2
    t = float(np.sum(a * a))
    d = abs(float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]))
    hi = max(t + 2.0 * d, 0.0)
    lo = max(t - 2.0 * d, 0.0)
    return (math.sqrt(hi) + math.sqrt(lo)) / 2.0


def _spectral_norm_power(a, tol=1e-12, max_iter=10_000):
    n = a.shape[0]
    if n == 1:
        return abs(float(a[0, 0]))
    b = a.T @ a
    v = np.ones(n) + np.arange(n) / (7.0 * n)
    v /= np.linalg.norm(v)
    lam_prev = 0.0
    lam = 0.0
    for _ in range(max_iter):
        w = b @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
        if abs(lam - lam_prev) <= tol * max(1.0, lam):
            break
        lam_prev = lam
    return math.sqrt(lam)


def op_norm(m, kind=NormKind.L1_OP):
    """Operator norm induced by the given l^p vector norm.

    L1/LINF are exact Fractions for rational input; L2 is always a float
    (closed form for n = 2, power iteration otherwise).
    """
    if isinstance(m, RationalMatrix):
        if kind is NormKind.L2_OP:
            a = m.to_array()
            return _spectral_norm_2x2(a) if m.n == 2 else _spectral_norm_power(a)
        n, d = m.n, m._den
        if kind is NormKind.L1_OP:
            sums = [sum(abs(m._num[i * n + j]) for i in range(n)) for j in range(n)]
        else:
            sums = [sum(abs(m._num[i * n + j]) for j in range(n)) for i in range(n)]
        return Fraction(max(sums), d)
    if isinstance(m, FloatMatrix):
        a = m.array
        if kind is NormKind.L1_OP:
            return float(np.max(np.sum(np.abs(a), axis=0)))
        if kind is NormKind.LINF_OP:
            return float(np.max(np.sum(np.abs(a), axis=1)))
        return _spectral_norm_2x2(a) if m.n == 2 else _spectral_norm_power(a)
    raise TypeError("op_norm expects a RationalMatrix or FloatMatrix")


# ---------------------------------------------------------------------------
# exact rank and multiplicity


def _int_rank(nums, n):
    # one-step Bareiss (fraction-free) elimination; all divisions exact
    a = [list(nums[i * n : (i + 1) * n]) for i in range(n)]
    r = 0
    prev = 1
    for c in range(n):
        p = next((i for i in range(r, n) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, n):
            aic = a[i][c]
            row_i, row_r = a[i], a[r]
            for j in range(c + 1, n):
                row_i[j] = (piv * row_i[j] - aic * row_r[j]) // prev
            row_i[c] = 0
        prev = piv
        r += 1
    return r


def rank_exact(m: RationalMatrix) -> int:
    """Exact rank over the rationals via fraction-free elimination."""
    return _int_rank(m._num, m.n)


def geometric_multiplicity(m: RationalMatrix, lam) -> int:
    """dim ker(M - lam*Id), exact: n minus the rank of the shifted matrix."""
    lam = as_fraction(lam)
    n = m.n
    nums = [v * lam.denominator for v in m._num]
    shift = lam.numerator * m._den
    for i in range(n):
        nums[i * n + i] -= shift
    return n - _int_rank(nums, n)


# ---------------------------------------------------------------------------
# exponentials and logarithms


def exp_nilpotent(m: RationalMatrix) -> RationalMatrix:
    """Exact exponential sum_{j<n} M^j/j! of a nilpotent matrix.

    Nilpotency is tested by repeated squaring up to M^n; raises NotNilpotent
    otherwise.
    """
    n = m.n
    b = m
    e = 1
    while e < n:
        b = b * b
        e *= 2
    if not b.is_zero():
        raise NotNilpotent("matrix is not nilpotent")
    out = RationalMatrix.identity(n)
    power = RationalMatrix.identity(n)
    fact = 1
    for j in range(1, n):
        power = power * m
        if power.is_zero():
            break
        fact *= j
        out = out + power * Fraction(1, fact)
    return out


def exp_float(m: FloatMatrix) -> FloatMatrix:
    """Matrix exponential (scaling-and-squaring with Pade core, via scipy)."""
    return FloatMatrix(scipy.linalg.expm(m.array))


def log_integral(a: FloatMatrix, nodes: int = 64) -> FloatMatrix:
    """Principal matrix logarithm by Gauss-Legendre quadrature of
    (A - 1) / (lam + (1 - lam) A) over lam in [0, 1].

    Raises SingularPencil when the pencil is numerically singular at the
    lam = 0 endpoint (A itself) or at any quadrature node, which signals
    spectrum touching the closed negative half-axis; eigenvalues that land
    between the nodes escape this condition estimate.
    """
    if nodes < 2:
        raise DomainError("at least 2 quadrature nodes required")
    x, w = np.polynomial.legendre.leggauss(nodes)
    lam = (x + 1.0) / 2.0
    wt = w / 2.0
    arr = a.array
    n = a.n
    cond = np.linalg.cond(arr)
    if not np.isfinite(cond) or cond > PENCIL_CONDITION_LIMIT:
        raise SingularPencil(f"input matrix has cond={cond:.3e}")
    eye = np.eye(n)
    shifted = arr - eye
    out = np.zeros((n, n))
    for lam_i, w_i in zip(lam, wt):
        pencil = lam_i * eye + (1.0 - lam_i) * arr
        cond = np.linalg.cond(pencil)
        if not np.isfinite(cond) or cond > PENCIL_CONDITION_LIMIT:
            raise SingularPencil(f"resolvent at lam={lam_i:.6f} has cond={cond:.3e}")
        out += w_i * np.linalg.solve(pencil, shifted)
    return FloatMatrix(out)
