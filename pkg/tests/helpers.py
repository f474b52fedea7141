"""Seeded random instances shared by the test modules."""

import numpy as np

from ilpce.model import (
    FavoredSpace,
    LinearConstraint,
    MutableSpace,
    PresentProblem,
    check_strong,
    check_weak,
)

EXAMPLE = PresentProblem((1, 2, 2), (1, 3, 2), 3)
EXAMPLE_D = FavoredSpace.positive([2])
EXAMPLE_H = MutableSpace.build(EXAMPLE, "constraint", a_box=((1, 1), (0, 4), (0, 4)))

TABLE_WEIGHTS = (135, 848, 764, 256, 496, 450, 652, 789, 94, 29)
TABLE_DEMAND = 2358


def random_favored(rng, n):
    kind = rng.choice(["fix+", "fix-", "atleast"])
    if kind == "atleast":
        alpha = rng.integers(0, 3, n)
        if not alpha.any():
            alpha[rng.integers(n)] = 1
        return FavoredSpace.at_least(alpha.tolist(), int(rng.integers(1, 3)))
    k = int(rng.integers(1, min(n, 2) + 1))
    idx = rng.choice(n, size=k, replace=False).tolist()
    return FavoredSpace.positive(idx) if kind == "fix+" else FavoredSpace.negative(idx)


def random_case(seed, mode, *, n=None, kind="weak"):
    """A small (problem, favored space, mutable space) triple with a brute-forceable grid.

    Most draws are redrawn until the present parameters are not already a CE
    of ``kind``, so the solvers have something to do.
    """
    rng = np.random.default_rng(seed)
    keep_trivial = rng.random() < 0.15
    check = check_strong if kind == "strong" else check_weak
    for _ in range(30):
        case = _draw(rng, mode, n)
        p, D, _ = case
        if keep_trivial or not check(p, D, p.params, method="enumerate").yes:
            return case
    return case


def _draw(rng, mode, n):
    if n is None:
        n = int(rng.integers(3, {"all": 4, "objective": 6}.get(mode, 7)))
    c = rng.integers(1, 10, n)
    a = rng.integers(0, 8, n)
    b = int(rng.integers(1, max(2, a.sum())))
    immutable = ()
    if rng.random() < 0.25:
        immutable = (LinearConstraint(tuple([1] * n), "<=", int(rng.integers(2, n + 1))),)
    p = PresentProblem(c.tolist(), a.tolist(), b, immutable)
    D = random_favored(rng, n)
    w = {"all": 1, "objective": int(rng.integers(2, 4))}.get(mode, int(rng.integers(1, 3)))
    box = lambda v, lo=None: (v - w if lo is None else max(lo, v - w), v + w)
    c_box = tuple(box(int(v)) for v in c)
    a_box = tuple(box(int(v), 0) for v in a)
    b_box = box(b) if mode != "rhs" else (b - int(rng.integers(0, 6)), b + int(rng.integers(0, 6)))
    if mode == "constraint" and rng.random() < 0.5:
        b_box = (b, b)
    H = MutableSpace.build(p, mode, c_box=c_box, a_box=a_box, b_box=b_box)
    return p, D, H
