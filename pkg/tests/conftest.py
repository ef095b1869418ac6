"""Shared test helpers: independent oracles kept deliberately naive.

The oracles here avoid the production code paths: ranks come from plain
Gaussian elimination over Fractions, matrix products from entrywise Fraction
arithmetic, and triangular exponentials from the 2x2 closed form.
"""

import math
import random
from fractions import Fraction

import pytest

from magnuslab.linalg import RationalMatrix


def gauss_rank(entries):
    """Rank by textbook Gaussian elimination with Fraction division."""
    rows = [[Fraction(v) for v in r] for r in entries]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][c] / pr[c]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        rank += 1
    return rank


def frac_matmul(a, b):
    """Product of two tuples-of-tuples of Fractions, entrywise arithmetic."""
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def frac_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def frac_scale(a, s):
    s = Fraction(s)
    return tuple(tuple(x * s for x in row) for row in a)


def exp_triangular_2x2(a, b, c):
    """Closed-form exponential of [[a, b], [0, c]] as row lists of floats."""
    ea, ec = math.exp(a), math.exp(c)
    phi = ea if a == c else (ea - ec) / (a - c)
    return [[ea, b * phi], [0.0, ec]]


def rand_rational_matrix(rng, n, lo=-10, hi=10, maxden=6):
    return RationalMatrix(
        [
            [Fraction(rng.randint(lo, hi), rng.randint(1, maxden)) for _ in range(n)]
            for _ in range(n)
        ]
    )


@pytest.fixture
def rng():
    return random.Random(20240811)
