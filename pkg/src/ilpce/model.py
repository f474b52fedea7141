"""Present problems, favored and mutable spaces, distance, and CE point checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import mip

MODES = ("objective", "constraint", "rhs", "all")
KINDS = ("weak", "strong")


@dataclass(frozen=True)
class LinearConstraint:
    """``coeffs . x  <comparator>  rhs`` over the solution vector."""

    coeffs: tuple
    comparator: str
    rhs: int

    def holds(self, x: Sequence[int]) -> bool:
        lhs = sum(c * v for c, v in zip(self.coeffs, x))
        if self.comparator == "<=":
            return lhs <= self.rhs
        if self.comparator == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class PresentProblem:
    """``min c_hat.x  s.t.  a_hat.x >= b_hat,  x binary,  immutable rows``."""

    c_hat: tuple
    a_hat: tuple
    b_hat: int
    immutable: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "c_hat", tuple(_int(v, "c_hat") for v in self.c_hat))
        object.__setattr__(self, "a_hat", tuple(_int(v, "a_hat") for v in self.a_hat))
        object.__setattr__(self, "b_hat", _int(self.b_hat, "b_hat"))
        if len(self.c_hat) != len(self.a_hat):
            raise ValueError("c_hat and a_hat must have the same length")
        rows = []
        for con in self.immutable:
            if not isinstance(con, LinearConstraint):
                con = LinearConstraint(*con)
            coeffs = tuple(_int(v, "immutable coefficient") for v in con.coeffs)
            if len(coeffs) != self.n:
                raise ValueError("immutable constraint length differs from n")
            if con.comparator not in mip.model.COMPARATORS:
                raise ValueError(f"bad comparator {con.comparator!r}")
            rows.append(LinearConstraint(coeffs, con.comparator, _int(con.rhs, "rhs")))
        object.__setattr__(self, "immutable", tuple(rows))

    @property
    def n(self) -> int:
        return len(self.c_hat)

    @property
    def params(self) -> "Params":
        return Params(self.c_hat, self.a_hat, self.b_hat)

    def in_x(self, x: Sequence[int]) -> bool:
        return all(con.holds(x) for con in self.immutable)


def _int(v, what) -> int:
    if isinstance(v, (bool, np.bool_)):
        raise ValueError(f"{what} must be integral, got {v!r}")
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, float) and v.is_integer():
        return int(v)
    raise ValueError(f"{what} must be integral, got {v!r}")


class Params(NamedTuple):
    c: tuple
    a: tuple
    b: int


@dataclass(frozen=True)
class FavoredSpace:
    """A favored solution space given by fixations or one covering row.

    ``kind`` is ``"fix+"`` (x_i = 1 on ``indices``), ``"fix-"`` (x_i = 0 on
    ``indices``) or ``"atleast"`` (``alpha . x >= beta``).
    """

    kind: str
    indices: tuple = ()
    alpha: tuple = ()
    beta: int = 0

    @classmethod
    def positive(cls, indices) -> "FavoredSpace":
        return cls("fix+", tuple(sorted(set(int(i) for i in indices))))

    @classmethod
    def negative(cls, indices) -> "FavoredSpace":
        return cls("fix-", tuple(sorted(set(int(i) for i in indices))))

    @classmethod
    def at_least(cls, alpha, beta) -> "FavoredSpace":
        alpha = tuple(_int(v, "alpha") for v in alpha)
        if any(v < 0 for v in alpha):
            raise ValueError("alpha must be nonnegative")
        return cls("atleast", alpha=alpha, beta=_int(beta, "beta"))

    def __post_init__(self):
        if self.kind not in ("fix+", "fix-", "atleast"):
            raise ValueError(f"unknown favored space kind {self.kind!r}")

    def check_size(self, n: int) -> None:
        if self.kind == "atleast":
            if len(self.alpha) != n:
                raise ValueError("alpha length differs from n")
        elif any(not 0 <= i < n for i in self.indices):
            raise ValueError("fixation index out of range")

    def contains(self, x: Sequence[int]) -> bool:
        if self.kind == "fix+":
            return all(x[i] == 1 for i in self.indices)
        if self.kind == "fix-":
            return all(x[i] == 0 for i in self.indices)
        return sum(a * v for a, v in zip(self.alpha, x)) >= self.beta

    def fixings(self) -> dict:
        """Variable fixations implied by membership (empty for ``atleast``)."""
        if self.kind == "fix+":
            return {i: 1 for i in self.indices}
        if self.kind == "fix-":
            return {i: 0 for i in self.indices}
        return {}

    def constraints(self, n: int) -> list:
        """Linear description of membership."""
        if self.kind == "atleast":
            return [LinearConstraint(self.alpha, ">=", self.beta)]
        val = 1 if self.kind == "fix+" else 0
        rows = []
        for i in self.indices:
            coeffs = [0] * n
            coeffs[i] = 1
            rows.append(LinearConstraint(tuple(coeffs), "==", val))
        return rows

    def complement_constraints(self, n: int) -> list:
        """Exact linear description of binary vectors outside the space."""
        if self.kind == "atleast":
            return [LinearConstraint(self.alpha, "<=", self.beta - 1)]
        coeffs = [0] * n
        for i in self.indices:
            coeffs[i] = 1
        if self.kind == "fix+":
            return [LinearConstraint(tuple(coeffs), "<=", len(self.indices) - 1)]
        return [LinearConstraint(tuple(coeffs), ">=", 1)]

    @property
    def is_everything(self) -> bool:
        if self.kind == "atleast":
            return self.beta <= 0
        return not self.indices


@dataclass(frozen=True)
class MutableSpace:
    """Integer boxes for (c, a, b). Immutable parts are degenerate boxes."""

    mode: str
    c_box: tuple
    a_box: tuple
    b_box: tuple

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "c_box", tuple((int(l), int(h)) for l, h in self.c_box))
        object.__setattr__(self, "a_box", tuple((int(l), int(h)) for l, h in self.a_box))
        object.__setattr__(self, "b_box", (int(self.b_box[0]), int(self.b_box[1])))
        for l, h in self.c_box + self.a_box + (self.b_box,):
            if l > h:
                raise ValueError(f"empty interval [{l}, {h}]")

    @classmethod
    def build(cls, p: PresentProblem, mode: str, c_box=None, a_box=None, b_box=None) -> "MutableSpace":
        """Boxes for ``mode``; components the mode keeps fixed collapse to the present value."""
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        c_deg = tuple((v, v) for v in p.c_hat)
        a_deg = tuple((v, v) for v in p.a_hat)
        b_deg = (p.b_hat, p.b_hat)
        c_box = c_deg if c_box is None or mode in ("constraint", "rhs") else c_box
        a_box = a_deg if a_box is None or mode in ("objective", "rhs") else a_box
        b_box = b_deg if b_box is None or mode == "objective" else b_box
        space = cls(mode, c_box, a_box, b_box)
        space.validate(p)
        return space

    def validate(self, p: PresentProblem) -> None:
        if len(self.c_box) != p.n or len(self.a_box) != p.n:
            raise ValueError("box dimension differs from n")
        for (l, h), v in zip(self.c_box + self.a_box + (self.b_box,), p.c_hat + p.a_hat + (p.b_hat,)):
            if not l <= v <= h:
                raise ValueError("mutable space must contain the present parameters")
        if self.mode in ("constraint", "rhs") and any(l != h for l, h in self.c_box):
            raise ValueError(f"mode {self.mode!r} requires a degenerate c box")
        if self.mode in ("objective", "rhs") and any(l != h for l, h in self.a_box):
            raise ValueError(f"mode {self.mode!r} requires a degenerate a box")
        if self.mode == "objective" and self.b_box[0] != self.b_box[1]:
            raise ValueError("mode 'objective' requires a degenerate b box")

    def contains(self, params: Params) -> bool:
        pairs = zip(self.c_box + self.a_box + (self.b_box,), tuple(params.c) + tuple(params.a) + (params.b,))
        return all(l <= v <= h for (l, h), v in pairs)

    @property
    def size(self) -> int:
        total = 1
        for l, h in self.c_box + self.a_box + (self.b_box,):
            total *= h - l + 1
        return total

    @property
    def a_max(self) -> tuple:
        return tuple(h for _, h in self.a_box)

    @property
    def b_min(self) -> int:
        return self.b_box[0]


@dataclass(frozen=True)
class Distance:
    """Weighted l1 distance between parameter triples (all weights 1 by default)."""

    c_weights: Optional[tuple] = None
    a_weights: Optional[tuple] = None
    b_weight: int = 1

    def __post_init__(self):
        for name in ("c_weights", "a_weights"):
            w = getattr(self, name)
            if w is not None:
                object.__setattr__(self, name, tuple(_int(v, name) for v in w))
        object.__setattr__(self, "b_weight", _int(self.b_weight, "b_weight"))
        if min((self.c_weights or ()) + (self.a_weights or ()) + (self.b_weight,)) < 0:
            raise ValueError("distance weights must be nonnegative")

    def wc(self, n: int) -> tuple:
        return self.c_weights if self.c_weights is not None else (1,) * n

    def wa(self, n: int) -> tuple:
        return self.a_weights if self.a_weights is not None else (1,) * n

    def cost(self, params: Params, present: Params) -> int:
        n = len(present.c)
        total = sum(w * abs(x - y) for w, x, y in zip(self.wc(n), params.c, present.c))
        total += sum(w * abs(x - y) for w, x, y in zip(self.wa(n), params.a, present.a))
        return total + self.b_weight * abs(params.b - present.b)


@dataclass
class SolveStats:
    values_examined: list = field(default_factory=list)
    cuts_per_subproblem: list = field(default_factory=list)
    subproblem_solves: int = 0
    wall_time: float = 0.0
    trace: list = field(default_factory=list)  # (v, incumbent cost or None, lower bound or None)
    value_range: Optional[tuple] = None
    lower_bound_enabled: bool = True

    @property
    def cuts_total(self) -> int:
        return sum(self.cuts_per_subproblem)

    @property
    def range_size(self) -> Optional[int]:
        if self.value_range is None:
            return None
        return self.value_range[1] - self.value_range[0] + 1


@dataclass
class CeResult:
    status: str  # "Optimal" | "Infeasible" | "BudgetExceeded"
    params: Optional[Params] = None
    cost: Optional[int] = None
    witness: Optional[tuple] = None
    stats: SolveStats = field(default_factory=SolveStats)
    kind: str = "weak"
    mode: str = "constraint"

    @property
    def optimal(self) -> bool:
        return self.status == "Optimal"


@dataclass(frozen=True)
class CheckResult:
    yes: bool
    witness: Optional[tuple]
    value: Optional[int]  # optimum over all feasible solutions
    favored_value: Optional[int]
    other_value: Optional[int] = None  # optimum outside the favored space (strong checks)

    def __bool__(self) -> bool:
        return self.yes


# --- point checks -------------------------------------------------------------

def _x_model(p: PresentProblem, c, a, b) -> tuple:
    model = mip.MipModel()
    xs = [model.add_binary(f"x{i}") for i in range(p.n)]
    model.add_constraint(dict(zip(xs, a)), ">=", b)
    for con in p.immutable:
        model.add_constraint(dict(zip(xs, con.coeffs)), con.comparator, con.rhs)
    model.set_objective(dict(zip(xs, c)))
    return model, xs


def _restricted_min(p, params, extra_rows, fixings, deadline=None):
    model, xs = _x_model(p, params.c, params.a, params.b)
    if fixings:
        for i, v in fixings.items():
            model.add_constraint({xs[i]: 1}, "==", v)
    for con in extra_rows:
        model.add_constraint(dict(zip(xs, con.coeffs)), con.comparator, con.rhs)
    sol = mip.solve(model, deadline=deadline)
    if not sol.optimal:
        return None, None
    return sol.objective, tuple(sol.assignment)


def _enumerate_values(p, params, D):
    """(optimum, favored optimum + argmin, outside optimum) by enumeration."""
    n = p.n
    if n > 22:
        raise ValueError("enumeration is limited to n <= 22")
    X = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64).reshape(-1, n)
    ok = X @ np.array(params.a, dtype=np.int64) >= params.b
    for con in p.immutable:
        act = X @ np.array(con.coeffs, dtype=np.int64)
        ok &= {"<=": act <= con.rhs, ">=": act >= con.rhs, "==": act == con.rhs}[con.comparator]
    vals = X @ np.array(params.c, dtype=np.int64)
    inD = np.array([D.contains(row) for row in X.tolist()], dtype=bool) if n else np.ones(1, bool)

    def best(mask):
        if not mask.any():
            return None, None
        idx = np.flatnonzero(mask)
        k = idx[np.argmin(vals[idx])]
        return int(vals[k]), tuple(int(v) for v in X[k])

    return best(ok), best(ok & inD), best(ok & ~inD)


def check_weak(p: PresentProblem, D: FavoredSpace, params: Params, *,
               method: str = "mip", deadline=None) -> CheckResult:
    """Is some optimal solution for ``params`` inside ``D``?

    ``method="enumerate"`` evaluates every binary vector instead of using the
    solver (the oracle path).
    """
    params = Params(*params)
    if method == "enumerate":
        (opt, _), (fav, wit), _ = _enumerate_values(p, params, D)
    else:
        opt, _ = _restricted_min(p, params, [], {}, deadline)
        fav, wit = (None, None)
        if opt is not None:
            fav, wit = _restricted_min(p, params, D.constraints(p.n) if D.kind == "atleast" else [],
                                       D.fixings(), deadline)
    yes = opt is not None and fav is not None and fav == opt
    return CheckResult(yes, wit if yes else None, opt, fav)


def check_strong(p: PresentProblem, D: FavoredSpace, params: Params, *,
                 method: str = "mip", deadline=None) -> CheckResult:
    """Are all optimal solutions for ``params`` inside ``D``?"""
    params = Params(*params)
    if method == "enumerate":
        (opt, _), (fav, wit), (other, _) = _enumerate_values(p, params, D)
    else:
        opt, _ = _restricted_min(p, params, [], {}, deadline)
        fav = wit = other = None
        if opt is not None:
            fav, wit = _restricted_min(p, params, D.constraints(p.n) if D.kind == "atleast" else [],
                                       D.fixings(), deadline)
        if fav is not None and fav == opt:
            other, _ = _restricted_min(p, params, D.complement_constraints(p.n), {}, deadline)
    yes = (
        opt is not None
        and fav is not None
        and fav == opt
        and (other is None or fav <= other - 1)
    )
    return CheckResult(yes, wit if yes else None, opt, fav, other)
