# cython: language_level=3
"""Compiled integer kernels: same contract as _kernels_py, selected at import."""

from math import gcd

BACKEND = "cython"


def imat_mul(list a, list b, Py_ssize_t n):
    cdef Py_ssize_t i, j, k, ib, kb
    cdef list out = [0] * (n * n)
    cdef object aik, bkj
    for i in range(n):
        ib = i * n
        for k in range(n):
            aik = a[ib + k]
            if aik:
                kb = k * n
                for j in range(n):
                    bkj = b[kb + j]
                    if bkj:
                        out[ib + j] = out[ib + j] + aik * bkj
    return out


def normalize_packed(list nums, object den):
    cdef Py_ssize_t i, m = len(nums)
    cdef object g = 0
    cdef object v
    for i in range(m):
        v = nums[i]
        if v:
            g = gcd(g, v)
    if g == 0:
        return None
    g = gcd(g, den)
    if g != 1:
        nums = [v // g for v in nums]
        den = den // g
    return nums, den


def series_mul_packed(list ca, list cb, Py_ssize_t n, Py_ssize_t K):
    cdef Py_ssize_t i, j, t, m = n * n
    cdef list out = [None] * (K + 1)
    cdef list acc, prod, na, nb
    cdef object accden, pd, da, db, g, lc, sa, sb
    cdef object pa, pb
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
                        acc[t] = acc[t] + prod[t] * sb
                else:
                    for t in range(m):
                        acc[t] = acc[t] * sa + prod[t] * sb
                accden = lc
        if acc is not None:
            out[j] = normalize_packed(acc, accden)
    return out
