# cython: language_level=3
"""Compiled kernels: dense bounded dual simplex and the multi-constraint
cover DP. Array layouts match ``pylp`` and ``pydp``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, isfinite, INFINITY

cnp.import_array()

DEF DEGENERATE_RUN = 30
DEF TIE_TOL = 1e-12

ctypedef cnp.int64_t i64
ctypedef cnp.uint8_t u8


cdef void _place_nonbasic(double[::1] x, double[::1] d, i64[::1] pos,
                          u8[::1] at_upper, double[::1] lo, double[::1] hi,
                          double tol) noexcept nogil:
    cdef Py_ssize_t j, N = x.shape[0]
    cdef bint side
    for j in range(N):
        if pos[j] >= 0:
            continue
        side = at_upper[j] != 0
        if d[j] < -tol and isfinite(hi[j]):
            side = True
        elif d[j] > tol and isfinite(lo[j]):
            side = False
        if lo[j] == hi[j]:
            side = False
        if side and not isfinite(hi[j]):
            side = False
        if (not side) and not isfinite(lo[j]):
            side = True
        at_upper[j] = 1 if side else 0
        x[j] = hi[j] if side else lo[j]


cdef void _recompute_basic(double[:, ::1] T, double[::1] x,
                           i64[::1] basis, i64[::1] pos) noexcept nogil:
    cdef Py_ssize_t r, j, m = T.shape[0], N = T.shape[1]
    cdef double acc
    for r in range(m):
        acc = 0.0
        for j in range(N):
            if pos[j] < 0:
                acc += T[r, j] * x[j]
        x[basis[r]] = -acc


def dual_simplex(double[:, ::1] T, double[::1] x, double[::1] d,
                 i64[::1] basis, i64[::1] pos, u8[::1] at_upper,
                 double[::1] lo, double[::1] hi, long max_iter,
                 double tol, double ptol):
    cdef Py_ssize_t m = T.shape[0], N = T.shape[1]
    cdef Py_ssize_t r, i, j, q, p
    cdef double v, best_viol, below, above, a, ratio, tmin, amax
    cdef double piv, dxq, target, f, dq
    cdef bint go_up, elig, upper, bland = False
    cdef long it = 0, degenerate = 0
    cdef double[::1] col = np.empty(m, dtype=np.float64)

    with nogil:
        _place_nonbasic(x, d, pos, at_upper, lo, hi, tol)
        _recompute_basic(T, x, basis, pos)
    if m == 0:
        return 0, 0, -1

    while True:
        # leaving row: largest bound violation, lowest row on ties
        # (Bland mode: violated basic column with the smallest index)
        r = -1
        best_viol = tol
        go_up = False
        for i in range(m):
            p = basis[i]
            below = lo[p] - x[p]
            above = x[p] - hi[p]
            v = below if below > above else above
            if bland:
                if v > tol and (r < 0 or p < basis[r]):
                    r = i
                    go_up = below > above
            elif v > best_viol:
                best_viol = v
                r = i
                go_up = below > above
        if r < 0:
            return 0, it, -1
        if it >= max_iter:
            return 2, it, r
        p = basis[r]
        target = lo[p] if go_up else hi[p]

        # ratio test: minimal |d|/|alpha|, near ties by largest |alpha|
        q = -1
        tmin = INFINITY
        for j in range(N):
            if pos[j] >= 0 or lo[j] == hi[j]:
                continue
            a = T[r, j]
            upper = at_upper[j] != 0
            if go_up:
                elig = (not upper and a < -ptol) or (upper and a > ptol)
            else:
                elig = (not upper and a > ptol) or (upper and a < -ptol)
            if elig:
                ratio = fabs(d[j]) / fabs(a)
                if ratio < tmin:
                    tmin = ratio
        if tmin == INFINITY:
            return 1, it, r
        amax = -1.0
        for j in range(N):
            if pos[j] >= 0 or lo[j] == hi[j]:
                continue
            a = T[r, j]
            upper = at_upper[j] != 0
            if go_up:
                elig = (not upper and a < -ptol) or (upper and a > ptol)
            else:
                elig = (not upper and a > ptol) or (upper and a < -ptol)
            if elig:
                ratio = fabs(d[j]) / fabs(a)
                if ratio <= tmin + TIE_TOL:
                    if bland:
                        q = j
                        break
                    if fabs(a) > amax:
                        amax = fabs(a)
                        q = j
        if tmin <= TIE_TOL:
            degenerate += 1
            if degenerate >= DEGENERATE_RUN:
                bland = True
        else:
            degenerate = 0

        with nogil:
            piv = T[r, q]
            dxq = (x[p] - target) / piv
            for i in range(m):
                col[i] = T[i, q]
            for i in range(m):
                x[basis[i]] -= col[i] * dxq
            x[q] += dxq
            x[p] = target

            for j in range(N):
                T[r, j] /= piv
            col[r] = 0.0
            for i in range(m):
                f = col[i]
                if f != 0.0:
                    for j in range(N):
                        T[i, j] -= f * T[r, j]
            dq = d[q]
            if dq != 0.0:
                for j in range(N):
                    d[j] -= dq * T[r, j]
            d[q] = 0.0

            basis[r] = q
            pos[q] = r
            pos[p] = -1
            at_upper[p] = 1 if (target == hi[p] and lo[p] != hi[p]) else 0
        it += 1


def cover_dp(i64[::1] cost, i64[:, ::1] contrib, i64[::1] caps, i64 big):
    """Minimum cost over item subsets whose clamped coverage reaches every cap.

    ``contrib`` is (n, k): column 0 is the mutable row, the rest are the
    favored-space rows. Returns (best or ``big`` if unreachable, update count).
    """
    cdef Py_ssize_t n = contrib.shape[0], k = contrib.shape[1]
    cdef Py_ssize_t t, i, s, src, dst, rem, comp, size = 1
    cdef i64 ops = 0, cand
    cdef i64[::1] stride = np.empty(k, dtype=np.int64)
    for t in range(k - 1, -1, -1):
        stride[t] = size
        size *= caps[t] + 1
    cdef i64[::1] table = np.full(size, big, dtype=np.int64)
    table[0] = 0
    with nogil:
        for i in range(n):
            # descending order lets the table be updated in place
            for src in range(size - 1, -1, -1):
                ops += 1
                if table[src] == big:
                    continue
                rem = src
                dst = 0
                for t in range(k):
                    comp = rem // stride[t]
                    rem = rem - comp * stride[t]
                    comp = comp + contrib[i, t]
                    if comp > caps[t]:
                        comp = caps[t]
                    dst += comp * stride[t]
                cand = table[src] + cost[i]
                if cand < table[dst]:
                    table[dst] = cand
    return table[size - 1], ops
