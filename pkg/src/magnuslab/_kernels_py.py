"""Pure-Python integer kernels (fallback when the compiled extension is absent).

A rational matrix is carried as ``(nums, den)``: a flat row-major list of
integer numerators over one positive integer denominator.  A packed series
coefficient is either ``None`` (exact zero) or such a pair.  The compiled
twin in ``_speedups.pyx`` must produce identical values.
"""

from math import gcd

BACKEND = "python"


def imat_mul(a, b, n):
    # integer n*n matrix product, flat row-major lists
    out = [0] * (n * n)
    for i in range(n):
        ib = i * n
        for k in range(n):
            aik = a[ib + k]
            if aik:
                kb = k * n
                for j in range(n):
                    bkj = b[kb + j]
                    if bkj:
                        out[ib + j] += aik * bkj
    return out


def normalize_packed(nums, den):
    # reduce by the content gcd; None encodes the exact zero matrix
    g = 0
    for v in nums:
        if v:
            g = gcd(g, v)
    if g == 0:
        return None
    g = gcd(g, den)
    if g != 1:
        nums = [v // g for v in nums]
        den //= g
    return nums, den


def series_mul_packed(ca, cb, n, K):
    # truncated Cauchy product of packed coefficient lists of length K+1
    m = n * n
    out = [None] * (K + 1)
    for j in range(K + 1):
        acc = None
        accden = 1
        for i in range(j + 1):
            pa = ca[i]
            if pa is None:
                continue
            pb = cb[j - i]
            if pb is None:
                continue
            na, da = pa
            nb, db = pb
            prod = imat_mul(na, nb, n)
            pd = da * db
            if acc is None:
                acc, accden = prod, pd
            else:
                g = gcd(accden, pd)
                lc = accden // g * pd
                sa = lc // accden
                sb = lc // pd
                if sa == 1:
                    for t in range(m):
                        acc[t] += prod[t] * sb
                else:
                    for t in range(m):
                        acc[t] = acc[t] * sa + prod[t] * sb
                accden = lc
        if acc is not None:
            out[j] = normalize_packed(acc, accden)
    return out
