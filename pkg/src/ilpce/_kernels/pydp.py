"""Numpy fallback for the multi-constraint cover DP (see ``_core.cover_dp``)."""

import numpy as np


def _move(table, axis, shift):
    """Shift mass along one axis by ``shift`` with saturation at the last cell."""
    if shift == 0:
        return table
    size = table.shape[axis]
    src = np.moveaxis(table, axis, 0)
    out = np.full_like(src, np.iinfo(np.int64).max)
    last = size - 1
    if shift < last:
        out[shift:last] = src[: last - shift]
        out[last] = src[last - shift :].min(axis=0)
    else:
        out[last] = src.min(axis=0)
    return np.moveaxis(out, 0, axis)


def cover_dp(cost, contrib, caps, big):
    cost = np.asarray(cost, dtype=np.int64)
    contrib = np.asarray(contrib, dtype=np.int64)
    caps = np.asarray(caps, dtype=np.int64)
    n, k = contrib.shape
    shape = tuple(int(c) + 1 for c in caps)
    table = np.full(shape, big, dtype=np.int64)
    table[(0,) * k] = 0
    size = int(np.prod(shape))
    for i in range(n):
        moved = table
        for t in range(k):
            moved = _move(moved, t, min(int(contrib[i, t]), int(caps[t])))
        reach = moved < big
        cand = np.where(reach, moved + cost[i], big)
        table = np.minimum(table, cand)
    return int(table[tuple(int(c) for c in caps)]), n * size
