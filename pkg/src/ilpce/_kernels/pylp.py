"""Dense bounded-variable dual simplex, numpy implementation.

This is the fallback used when the compiled ``_core`` extension is not
available. Both implementations follow the same pivoting rules so that they
visit the same bases on well-conditioned input.

State layout (shared with the compiled kernel)::

    T        (m, N) float64   B^-1 [A, -I]
    x        (N,)   float64   values of structurals then row activities
    d        (N,)   float64   reduced costs
    basis    (m,)   int64     column basic in each row
    pos      (N,)   int64     row of a basic column, -1 if nonbasic
    at_upper (N,)   uint8     nonbasic side flag
    lo, hi   (N,)   float64   column bounds (row bounds may be infinite)

After ``DEGENERATE_RUN`` consecutive degenerate pivots both kernels switch to
Bland's smallest-index rule for the rest of the call, which rules out cycling.

Status codes: 0 optimal, 1 infeasible (``row`` holds the failing row),
2 iteration limit.
"""

import numpy as np

OPTIMAL = 0
INFEASIBLE = 1
ITERATION_LIMIT = 2
DEGENERATE_RUN = 30
TIE_TOL = 1e-12


def place_nonbasic(x, d, pos, at_upper, lo, hi, tol):
    """Move every nonbasic column onto the bound its reduced cost asks for."""
    nonbasic = pos < 0
    fixed = lo == hi
    want_upper = (d < -tol) & np.isfinite(hi)
    want_lower = (d > tol) & np.isfinite(lo)
    side = at_upper.astype(bool)
    side = np.where(want_upper, True, np.where(want_lower, False, side))
    side = np.where(fixed, False, side)
    # a side pointing at an infinite bound is never allowed
    side = np.where(side & ~np.isfinite(hi), False, side)
    side = np.where(~side & ~np.isfinite(lo), True, side)
    at_upper[nonbasic] = side[nonbasic]
    x[nonbasic] = np.where(side, hi, lo)[nonbasic]


def recompute_basic(T, x, basis):
    xn = x.copy()
    xn[basis] = 0.0
    x[basis] = -(T @ xn)


def dual_simplex(T, x, d, basis, pos, at_upper, lo, hi, max_iter, tol, ptol):
    """Run dual simplex iterations in place from a dual feasible basis."""
    m = T.shape[0]
    place_nonbasic(x, d, pos, at_upper, lo, hi, tol)
    recompute_basic(T, x, basis)
    if m == 0:
        return OPTIMAL, 0, -1
    it = 0
    degenerate = 0
    bland = False
    while True:
        xb = x[basis]
        below = lo[basis] - xb
        above = xb - hi[basis]
        viol = np.maximum(below, above)
        r = int(np.argmax(viol))
        if not viol[r] > tol:
            return OPTIMAL, it, -1
        if bland:
            rows = np.flatnonzero(viol > tol)
            r = int(rows[np.argmin(basis[rows])])
        if it >= max_iter:
            return ITERATION_LIMIT, it, r
        p = int(basis[r])
        alpha = T[r]
        nonbasic = (pos < 0) & (lo != hi)
        upper = at_upper.astype(bool)
        if below[r] > above[r]:
            elig = nonbasic & ((~upper & (alpha < -ptol)) | (upper & (alpha > ptol)))
            target = lo[p]
        else:
            elig = nonbasic & ((~upper & (alpha > ptol)) | (upper & (alpha < -ptol)))
            target = hi[p]
        idx = np.flatnonzero(elig)
        if idx.size == 0:
            return INFEASIBLE, it, r
        a_abs = np.abs(alpha[idx])
        ratios = np.abs(d[idx]) / a_abs
        tmin = ratios.min()
        near = ratios <= tmin + TIE_TOL
        if bland:
            best = np.flatnonzero(near)[0]
        else:
            # among near ties prefer the largest pivot, then the lowest index
            best = np.flatnonzero(near)[np.argmax(a_abs[near])]
        q = int(idx[best])
        degenerate = degenerate + 1 if tmin <= TIE_TOL else 0
        if degenerate >= DEGENERATE_RUN:
            bland = True

        piv = T[r, q]
        dxq = (x[p] - target) / piv
        col = T[:, q].copy()
        x[basis] -= col * dxq
        x[q] += dxq
        x[p] = target

        T[r] /= piv
        col[r] = 0.0
        T -= np.outer(col, T[r])
        dq = d[q]
        d -= dq * T[r]
        d[q] = 0.0

        basis[r] = q
        pos[q] = r
        pos[p] = -1
        at_upper[p] = 1 if target == hi[p] and lo[p] != hi[p] else 0
        it += 1
