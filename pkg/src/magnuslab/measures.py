"""Step (piecewise-constant) operator measures: cumulative norms, ordered
exponentials, Magnus expansion terms, and the weighted second-order integral.

A measure is a finite ordered list of (density matrix, positive duration)
steps.  Its time-ordered exponential is the product of the step exponentials
with the earliest step leftmost, and its Magnus terms are the coefficients of
the series logarithm of that product, computed exactly over the rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple

from .errors import DomainError, ParseError, SizeMismatch
from .linalg import FloatMatrix, NormKind, RationalMatrix, as_fraction, exp_float, exp_nilpotent, op_norm
from .series import MatrixPowerSeries, series_exp, series_log, series_mul

Step = Tuple[RationalMatrix, Fraction]


@dataclass(frozen=True)
class StepMeasure:
    """Ordered list of (density, duration) steps, durations strictly positive."""

    steps: Tuple[Step, ...]

    def __post_init__(self):
        if not self.steps:
            raise DomainError("a step measure needs at least one step")
        n = self.steps[0][0].n
        for a, dur in self.steps:
            if a.n != n:
                raise SizeMismatch("step densities must share one size")
            if dur <= 0:
                raise DomainError("durations must be strictly positive")

    @classmethod
    def of(cls, steps: Iterable[tuple]) -> "StepMeasure":
        return cls(tuple((a, as_fraction(d)) for a, d in steps))

    @property
    def n(self) -> int:
        return self.steps[0][0].n

    def total_duration(self) -> Fraction:
        return sum((d for _, d in self.steps), Fraction(0))

    def concat(self, other: "StepMeasure") -> "StepMeasure":
        """Concatenation in time: self first, then other."""
        if self.n != other.n:
            raise SizeMismatch("measure sizes differ")
        return StepMeasure(self.steps + other.steps)

    def scale_durations(self, factor) -> "StepMeasure":
        f = as_fraction(factor)
        if f <= 0:
            raise DomainError("scale factor must be positive")
        return StepMeasure(tuple((a, d * f) for a, d in self.steps))


@dataclass(frozen=True)
class MagnusTermSequence:
    """Magnus expansion terms mu_1 .. mu_K of a step measure, exact."""

    terms: Tuple[RationalMatrix, ...]

    def __post_init__(self):
        if not self.terms:
            raise DomainError("empty term sequence")
        n = self.terms[0].n
        if any(t.n != n for t in self.terms):
            raise SizeMismatch("term sizes differ")

    @property
    def order(self) -> int:
        return len(self.terms)

    def term(self, k: int) -> RationalMatrix:
        """mu_k, 1-indexed."""
        if not 1 <= k <= len(self.terms):
            raise DomainError(f"k must be in 1..{len(self.terms)}")
        return self.terms[k - 1]


def cumulative_norm(phi: StepMeasure, kind: NormKind = NormKind.L1_OP):
    """Integral of the pointwise operator norm: sum of ||A_i|| * l_i.

    Exact Fraction for L1/LINF, float for L2.
    """
    if kind is NormKind.L2_OP:
        return float(sum(op_norm(a, kind) * float(d) for a, d in phi.steps))
    return sum((op_norm(a, kind) * d for a, d in phi.steps), Fraction(0))


def rexp_exact(phi: StepMeasure) -> RationalMatrix:
    """Exact time-ordered exponential for nilpotent steps, earliest leftmost."""
    out = RationalMatrix.identity(phi.n)
    for a, d in phi.steps:
        out = out * exp_nilpotent(a * d)
    return out


def rexp_float(phi: StepMeasure) -> FloatMatrix:
    """Floating time-ordered exponential, earliest step leftmost."""
    out = FloatMatrix.identity(phi.n)
    for a, d in phi.steps:
        out = out * exp_float((a * d).to_float())
    return out


def _log_of_product_series(phi: StepMeasure, order: int) -> MatrixPowerSeries:
    prod = None
    for a, d in phi.steps:
        factor = series_exp(a * d, order)
        prod = factor if prod is None else series_mul(prod, factor)
    return series_log(prod)


def magnus_terms(phi: StepMeasure, order: int) -> MagnusTermSequence:
    """mu_k = coefficient of t^k in log of the ordered product of exp(t l_i A_i).

    For step measures these are exactly the Magnus expansion terms; all
    arithmetic is exact.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    log = _log_of_product_series(phi, order)
    return MagnusTermSequence(tuple(log.coeffs[1:]))


def weighted_second_term(phi: StepMeasure, lam) -> RationalMatrix:
    """Second-order pair integral with ascent weight lam and descent weight
    lam - 1: lam * P + (lam - 1) * Q where P collects ascending pairs
    (t1 < t2) and Q descending ones, both including the half squares.

    Equals the Magnus term mu_2 at lam = 1/2, and differs from it by
    (lam - 1/2) * mu_1^2 in general.  Exact for rational lam.
    """
    lam = as_fraction(lam)
    if not 0 <= lam <= 1:
        raise DomainError("lam must lie in [0, 1]")
    n = phi.n
    asc = RationalMatrix.zeros(n)
    desc = RationalMatrix.zeros(n)
    prefix = RationalMatrix.zeros(n)
    for a, d in phi.steps:
        la = a * d
        half_sq = (la * la) * Fraction(1, 2)
        asc = asc + prefix * la + half_sq
        desc = desc + la * prefix + half_sq
        prefix = prefix + la
    return asc * lam + desc * (lam - 1)


def divergence_indicator(phi: StepMeasure, order: int, kind: NormKind = NormKind.L1_OP):
    """Sequence k -> ||mu_k||, k = 1..order, for diagnostic use only.

    No verdict is computed; growth, oscillation or decay is for the caller
    to interpret (divergence proofs come from exact certificates instead).
    """
    if order < 2:
        raise DomainError("order must be >= 2")
    terms = magnus_terms(phi, order)
    return [op_norm(t, kind) for t in terms.terms]


# ---------------------------------------------------------------------------
# JSON serialization: {"n": int, "steps": [{"matrix": [[...]], "duration": "p/q"}]}
# where rationals are "p/q" strings and bare integers are allowed.


def _rat_to_json(f: Fraction):
    return int(f) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _rat_from_json(v) -> Fraction:
    try:
        if isinstance(v, bool):
            raise TypeError
        if isinstance(v, (int, float, str)):
            return Fraction(v)
    except (TypeError, ValueError, ZeroDivisionError):
        pass
    raise ParseError(f"not a rational value: {v!r}")


def measure_to_json(phi: StepMeasure) -> dict:
    return {
        "n": phi.n,
        "steps": [
            {
                "matrix": [[_rat_to_json(v) for v in row] for row in a.entries],
                "duration": _rat_to_json(d),
            }
            for a, d in phi.steps
        ],
    }


def measure_from_json(obj) -> StepMeasure:
    if not isinstance(obj, dict) or "steps" not in obj:
        raise ParseError("measure object must be a dict with a 'steps' list")
    steps_obj = obj["steps"]
    if not isinstance(steps_obj, list) or not steps_obj:
        raise ParseError("'steps' must be a nonempty list")
    n = obj.get("n")
    steps = []
    for s in steps_obj:
        if not isinstance(s, dict) or "matrix" not in s or "duration" not in s:
            raise ParseError("each step needs 'matrix' and 'duration'")
        rows = s["matrix"]
        if not isinstance(rows, list) or not rows or any(not isinstance(r, list) for r in rows):
            raise ParseError("'matrix' must be a list of rows")
        try:
            a = RationalMatrix([[_rat_from_json(v) for v in row] for row in rows])
        except SizeMismatch as exc:
            raise ParseError(str(exc)) from exc
        if n is not None and a.n != n:
            raise ParseError(f"matrix size {a.n} contradicts declared n={n}")
        d = _rat_from_json(s["duration"])
        if d <= 0:
            raise ParseError("durations must be strictly positive")
        steps.append((a, d))
    return StepMeasure(tuple(steps))


def load_measure(path) -> StepMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    return measure_from_json(obj)


def dump_measure(phi: StepMeasure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(measure_to_json(phi), fh, indent=2)
        fh.write("\n")
