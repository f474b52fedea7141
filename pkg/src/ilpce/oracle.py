"""Brute-force ground truth: classify every point of a mutable parameter grid.

For each grid point all binary solutions are evaluated (no solver involved),
so the labels are independent of :mod:`ilpce.mip`. Work is vectorized over
chunks of grid points.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import Distance, FavoredSpace, MutableSpace, Params, PresentProblem

OUTSIDE, WEAK, STRONG = "outside", "weak", "strong"
LABELS = (OUTSIDE, WEAK, STRONG)
DEFAULT_CEILING = 10**6
MAX_N = 20
_CHUNK_CELLS = 1 << 22


class CeilingExceeded(ValueError):
    """The grid or the solution space is beyond the oracle's desk-scale limits."""


@dataclass
class RegionMap:
    """Labels, optimal values and distances for every grid point.

    ``axes`` names the coordinates that vary (``c0``, ``a2``, ``b`` ...);
    ``points`` holds their values, one row per grid point in lexicographic
    order. ``values`` is the optimal value (None when infeasible).
    """

    present: PresentProblem
    favored: FavoredSpace
    space: MutableSpace
    axes: tuple
    points: np.ndarray
    labels: np.ndarray
    values: list
    solutions: Optional[list]
    costs: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    def counts(self) -> dict:
        return {lab: int(np.sum(self.labels == lab)) for lab in LABELS}

    def index(self, point) -> int:
        hits = np.flatnonzero((self.points == np.asarray(point)).all(axis=1))
        if not hits.size:
            raise KeyError(f"{tuple(point)} is not a grid point")
        return int(hits[0])

    def label(self, point) -> str:
        return str(self.labels[self.index(point)])

    def params(self, k: int) -> Params:
        return _params_at(self.present, self.space, self.axes, self.points[k])

    def optimal_solutions(self, k: int) -> frozenset:
        if self.solutions is not None:
            return self.solutions[k]
        return _solution_set(self.present, self.params(k))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(list(self.axes) + ["label", "value", "cost"])
            for row, lab, val, cost in zip(self.points.tolist(), self.labels, self.values, self.costs):
                w.writerow(row + [lab, "" if val is None else val, int(cost)])


def _axes(space: MutableSpace) -> list:
    # the public ``enumerate`` shadows the builtin in this module
    axes = []
    for name, box in (("c", space.c_box), ("a", space.a_box)):
        for i in range(len(box)):
            lo, hi = box[i]
            if lo != hi:
                axes.append((f"{name}{i}", name, i, lo, hi))
    lo, hi = space.b_box
    if lo != hi:
        axes.append(("b", "b", 0, lo, hi))
    return axes


def _params_at(p, space, names, values) -> Params:
    c = [lo for lo, _ in space.c_box]
    a = [lo for lo, _ in space.a_box]
    b = space.b_box[0]
    for name, v in zip(names, values):
        v = int(v)
        if name == "b":
            b = v
        elif name[0] == "c":
            c[int(name[1:])] = v
        else:
            a[int(name[1:])] = v
    return Params(tuple(c), tuple(a), b)


def solution_space(p: PresentProblem) -> np.ndarray:
    """All binary vectors satisfying the immutable rows, one per row."""
    if p.n > MAX_N:
        raise CeilingExceeded(f"n = {p.n} exceeds the enumeration limit {MAX_N}")
    X = np.array(list(itertools.product((0, 1), repeat=p.n)), dtype=np.int64).reshape(-1, p.n)
    keep = np.ones(len(X), dtype=bool)
    for con in p.immutable:
        act = X @ np.array(con.coeffs, dtype=np.int64)
        keep &= {"<=": act <= con.rhs, ">=": act >= con.rhs, "==": act == con.rhs}[con.comparator]
    return X[keep]


def _favored_mask(D: FavoredSpace, X: np.ndarray) -> np.ndarray:
    if D.kind == "atleast":
        return X @ np.array(D.alpha, dtype=np.int64) >= D.beta
    idx = list(D.indices)
    if not idx:
        return np.ones(len(X), dtype=bool)
    want = 1 if D.kind == "fix+" else 0
    return (X[:, idx] == want).all(axis=1)


def _solution_set(p: PresentProblem, params: Params) -> frozenset:
    X = solution_space(p)
    feas = X @ np.array(params.a, dtype=np.int64) >= params.b
    if not feas.any():
        return frozenset()
    vals = X @ np.array(params.c, dtype=np.int64)
    best = vals[feas].min()
    return frozenset(tuple(int(v) for v in row) for row in X[feas & (vals == best)])


def enumerate(p: PresentProblem, D: FavoredSpace, H: MutableSpace, dist: Distance = Distance(), *,
              ceiling: int = DEFAULT_CEILING, keep_solutions: Optional[bool] = None) -> RegionMap:
    """Label every point of the grid ``H`` as outside, weak(-only) or strong.

    ``keep_solutions`` stores the optimal solution set of every point
    (default: only for grids of at most 10^4 points).
    """
    D.check_size(p.n)
    H.validate(p)
    if H.size > ceiling:
        raise CeilingExceeded(f"grid has {H.size} points, ceiling is {ceiling}")
    X = solution_space(p)
    in_d = _favored_mask(D, X)
    axes = _axes(H)
    names = tuple(a[0] for a in axes)
    ranges = [np.arange(lo, hi + 1, dtype=np.int64) for *_, lo, hi in axes]
    if ranges:
        grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, len(ranges))
    else:
        grid = np.zeros((1, 0), dtype=np.int64)
    total = len(grid)
    keep_solutions = total <= 10**4 if keep_solutions is None else keep_solutions

    base_c = np.array([lo for lo, _ in H.c_box], dtype=np.int64)
    base_a = np.array([lo for lo, _ in H.a_box], dtype=np.int64)
    base_b = H.b_box[0]
    c_cols = [(k, ax[2]) for k, ax in zip(range(len(axes)), axes) if ax[1] == "c"]
    a_cols = [(k, ax[2]) for k, ax in zip(range(len(axes)), axes) if ax[1] == "a"]
    b_col = next((k for k, ax in zip(range(len(axes)), axes) if ax[1] == "b"), None)

    wc = np.array(dist.wc(p.n), dtype=np.int64)
    wa = np.array(dist.wa(p.n), dtype=np.int64)
    labels = np.empty(total, dtype=object)
    values: list = [None] * total
    costs = np.zeros(total, dtype=np.int64)
    solutions = [None] * total if keep_solutions else None
    big = np.iinfo(np.int64).max
    step = max(1, _CHUNK_CELLS // max(len(X), 1))

    for start in range(0, total, step):
        pts = grid[start:start + step]
        P = len(pts)
        C = np.tile(base_c, (P, 1))
        A = np.tile(base_a, (P, 1))
        B = np.full(P, base_b, dtype=np.int64)
        for k, i in c_cols:
            C[:, i] = pts[:, k]
        for k, i in a_cols:
            A[:, i] = pts[:, k]
        if b_col is not None:
            B = pts[:, b_col]
        costs[start:start + P] = (
            np.abs(C - np.array(p.c_hat)) @ wc + np.abs(A - np.array(p.a_hat)) @ wa
            + dist.b_weight * np.abs(B - p.b_hat)
        )
        if len(X) == 0:
            labels[start:start + P] = OUTSIDE
            continue
        vals = C @ X.T
        feas = A @ X.T >= B[:, None]
        masked = np.where(feas, vals, big)
        opt = masked.min(axis=1)
        fav = np.where(in_d[None, :], masked, big).min(axis=1)
        other = np.where(~in_d[None, :], masked, big).min(axis=1)
        has = opt < big
        weak = has & (fav == opt)
        strong = weak & (other > opt)
        labels[start:start + P] = np.where(strong, STRONG, np.where(weak, WEAK, OUTSIDE))
        for j in range(P):
            if has[j]:
                values[start + j] = int(opt[j])
                if keep_solutions:
                    rows = X[masked[j] == opt[j]]
                    solutions[start + j] = frozenset(tuple(int(v) for v in r) for r in rows)
            elif keep_solutions:
                solutions[start + j] = frozenset()

    return RegionMap(p, D, H, names, grid, labels, values, solutions, costs)


def optimal_cost(region: RegionMap, dist: Optional[Distance] = None, kind: str = "weak"):
    """Smallest distance over CE points of ``kind`` (weak accepts strong points); None if none.

    ``dist`` defaults to the distance the map was built with.
    """
    if kind not in ("weak", "strong"):
        raise ValueError("kind must be 'weak' or 'strong'")
    ok = region.labels == STRONG
    if kind == "weak":
        ok = ok | (region.labels == WEAK)
    if not ok.any():
        return None
    if dist is None:
        costs = region.costs
    else:
        costs = np.array([dist.cost(region.params(k), region.present.params) for k in range(len(region))])
    return int(costs[ok].min())
