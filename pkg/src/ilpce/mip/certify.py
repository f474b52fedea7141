"""Exact certificates from approximate LP duals.

The node LPs run in floating point. Nothing they report is trusted for
pruning: a dual vector is rounded to a dyadic rational and the bound (or the
infeasibility proof) it implies is evaluated in integer arithmetic. Any dual
vector gives a valid bound, so rounding only costs tightness.
"""

from __future__ import annotations

import math

import numpy as np

# multipliers this small relative to the largest are round-off; dropping them
# keeps rows with an infinite bound out of the certificate
NOISE = 1e-9


class RowData:
    """Integer constraint data ``rlo <= A x <= rhi`` prepared for certificates."""

    def __init__(self, A, rlo, rhi, n):
        # A: list of int rows; rlo / rhi: lists of int or None
        self.m = len(A)
        self.n = n
        self.rlo = list(rlo)
        self.rhi = list(rhi)
        self.has_lo = np.array([v is not None for v in rlo], dtype=bool)
        self.has_hi = np.array([v is not None for v in rhi], dtype=bool)
        peak = max((abs(v) for row in A for v in row), default=0)
        self.wide = peak >= 1 << 40
        if self.wide:
            self.A = np.array(A, dtype=object).reshape(self.m, self.n)
            self.col_l1 = max((sum(abs(row[j]) for row in A) for j in range(self.n)), default=0)
        else:
            self.A = np.array(A, dtype=np.int64).reshape(self.m, self.n)
            self.col_l1 = int(np.abs(self.A).sum(axis=0).max()) if self.m and self.n else 0


def _scale_bits(peak: float, col_l1: int, extra: int) -> int:
    # largest k with peak * 2^k * col_l1 + extra * 2^k comfortably inside int64
    budget = peak * max(col_l1, 1) + extra + 1.0
    k = int(math.floor(62 - math.log2(budget))) - 3
    return max(0, min(k, 40))


def _to_int(vec: np.ndarray, bits: int, wide: bool):
    scaled = np.rint(np.ldexp(vec, bits))
    if wide or bits == 0 and np.abs(scaled).max(initial=0) >= 2**53:
        return np.array([int(v) for v in scaled], dtype=object)
    return scaled.astype(np.int64)


def _box_min(coef, lo, hi) -> int:
    coef = coef.tolist()
    return sum(c * (l if c >= 0 else h) for c, l, h in zip(coef, lo, hi))


def _box_max(coef, lo, hi) -> int:
    coef = coef.tolist()
    return sum(c * (h if c >= 0 else l) for c, l, h in zip(coef, lo, hi))


def lower_bound(rows: RowData, c: np.ndarray, c_peak: int, y: np.ndarray,
                lo: list, hi: list) -> int | None:
    """Ceiling of the Lagrangian bound ``min c.x`` over the box given row duals ``y``.

    Returns None when ``y`` cannot certify anything (non-finite input).
    """
    if not np.all(np.isfinite(y)):
        return None
    y = np.where(rows.has_lo, y, np.minimum(y, 0.0))
    y = np.where(rows.has_hi, y, np.maximum(y, 0.0))
    peak = float(np.abs(y).max(initial=0.0))
    bits = _scale_bits(peak, rows.col_l1, c_peak)
    y_int = _to_int(y, bits, rows.wide)
    y_int = np.where(rows.has_lo, y_int, np.minimum(y_int, 0))
    y_int = np.where(rows.has_hi, y_int, np.maximum(y_int, 0))
    if rows.wide or y_int.dtype == object:
        red = np.array([int(v) << bits for v in c.tolist()], dtype=object) - rows.A.T.dot(
            y_int.astype(object)
        )
    else:
        red = (c << bits) - rows.A.T @ y_int
    total = _box_min(red, lo, hi)
    for yi, l, h in zip(y_int.tolist(), rows.rlo, rows.rhi):
        if yi > 0:
            total += yi * l
        elif yi < 0:
            total += yi * h
    return -((-total) >> bits)


def proves_infeasible(rows: RowData, g: np.ndarray, lo: list, hi: list) -> bool:
    """True when ``g.(Ax) = g.s`` has no solution with x and s in their boxes."""
    if rows.m == 0 or not np.all(np.isfinite(g)):
        return False
    peak = float(np.abs(g).max(initial=0.0))
    if peak == 0.0:
        return False
    g = np.where(np.abs(g) > NOISE * peak, g, 0.0)
    bits = _scale_bits(peak, rows.col_l1, 0)
    g_int = _to_int(g, bits, rows.wide)
    if rows.wide or g_int.dtype == object:
        h = rows.A.T.dot(g_int.astype(object))
    else:
        h = rows.A.T @ g_int
    hmin = _box_min(h, lo, hi)
    hmax = _box_max(h, lo, hi)
    smin = 0
    smax = 0
    smin_inf = smax_inf = False
    for gi, l, u in zip(g_int.tolist(), rows.rlo, rows.rhi):
        if gi == 0:
            continue
        low_end, high_end = (l, u) if gi > 0 else (u, l)
        if low_end is None:
            smin_inf = True
        else:
            smin += gi * low_end
        if high_end is None:
            smax_inf = True
        else:
            smax += gi * high_end
    if not smin_inf and hmax < smin:
        return True
    if not smax_inf and hmin > smax:
        return True
    return False
