"""Model-building blocks shared by the weak and strong CE algorithms."""

from __future__ import annotations

import time
from typing import Optional

from . import mip
from .model import FavoredSpace, PresentProblem, SolveStats


class Run:
    """Per-call bookkeeping: deadline, statistics, counted subproblem solves."""

    def __init__(self, time_limit: Optional[float] = None, deadline: Optional[float] = None):
        self.start = time.perf_counter()
        self.deadline = deadline
        if time_limit is not None:
            limit = self.start + time_limit
            self.deadline = limit if deadline is None else min(deadline, limit)
        self.stats = SolveStats()

    def solve(self, model: mip.MipModel, cutoff=None) -> mip.MipSolution:
        if self.deadline is not None and time.perf_counter() >= self.deadline:
            raise mip.BudgetExceeded("time limit reached")
        self.stats.subproblem_solves += 1
        return mip.solve(model, cutoff, deadline=self.deadline)

    def finish(self) -> SolveStats:
        self.stats.wall_time = time.perf_counter() - self.start
        return self.stats


class CutPool:
    """Separated solutions with their present objective value, no duplicates."""

    def __init__(self):
        self._seen: dict = {}

    def __len__(self) -> int:
        return len(self._seen)

    def __contains__(self, y) -> bool:
        return tuple(y) in self._seen

    def add(self, y, value: int) -> bool:
        y = tuple(y)
        if y in self._seen:
            return False
        self._seen[y] = value
        return True

    def upto(self, limit: int) -> list:
        """Stored solutions whose present value is at most ``limit``."""
        return [y for y, v in self._seen.items() if v <= limit]

    def all(self) -> list:
        return list(self._seen)


class ParamVector:
    """A parameter vector whose entries are constants (degenerate box) or variables."""

    def __init__(self, model: mip.MipModel, prefix: str, boxes):
        self.model = model
        self.index: list = []
        self.const: list = []
        for i, (lo, hi) in enumerate(boxes):
            if lo == hi:
                self.index.append(None)
                self.const.append(lo)
            else:
                self.index.append(model.add_var(f"{prefix}{i}", lo, hi))
                self.const.append(None)

    def __len__(self) -> int:
        return len(self.index)

    def linear(self, coeffs) -> tuple:
        """``sum_i coeffs[i] * entry_i`` as (variable coefficients, constant)."""
        expr: dict = {}
        const = 0
        for k, j, c0 in zip(coeffs, self.index, self.const):
            if not k:
                continue
            if j is None:
                const += k * c0
            else:
                expr[j] = expr.get(j, 0) + k
        return expr, const

    def values(self, assignment) -> tuple:
        return tuple(c0 if j is None else assignment[j] for j, c0 in zip(self.index, self.const))

    def deviation(self, centers, weights) -> dict:
        pairs = [(j, c, w) for j, c, w in zip(self.index, centers, weights) if j is not None]
        if not pairs:
            return {}
        js, cs, ws = zip(*pairs)
        return mip.l1_objective(self.model, js, cs, ws)

    def times(self, xs) -> tuple:
        """``sum_i entry_i * x_i`` for binaries ``xs``, products linearized exactly."""
        expr: dict = {}
        for j, c0, x in zip(self.index, self.const, xs):
            if j is None:
                if c0:
                    expr[x] = expr.get(x, 0) + c0
            else:
                var = self.model.variables[x]
                if var.lower == var.upper:
                    if var.lower:
                        expr[j] = expr.get(j, 0) + 1
                    continue
                w = mip.add_product(self.model, j, x)
                expr[w] = expr.get(w, 0) + 1
        return expr, 0


def merge(*parts) -> dict:
    out: dict = {}
    for part in parts:
        for j, v in part.items():
            out[j] = out.get(j, 0) + v
    return out


def scale(expr: dict, k) -> dict:
    return {j: k * v for j, v in expr.items()}


def add_row(model: mip.MipModel, expr: dict, const, comparator: str, rhs) -> None:
    """Add ``expr + const  <comparator>  rhs``."""
    model.add_constraint(expr, comparator, rhs - const)


def solution_vars(model: mip.MipModel, p: PresentProblem, D: Optional[FavoredSpace],
                  region: str, prefix: str = "x") -> list:
    """Binary solution variables restricted to X ("X"), X and D ("D") or X minus D ("notD")."""
    fix = D.fixings() if region == "D" else {}
    xs = [model.add_var(f"{prefix}{i}", fix.get(i, 0), fix.get(i, 1)) for i in range(p.n)]
    rows = []
    if region == "D" and D.kind == "atleast":
        rows = D.constraints(p.n)
    elif region == "notD":
        rows = D.complement_constraints(p.n)
    for con in list(rows) + list(p.immutable):
        model.add_constraint(dict(zip(xs, con.coeffs)), con.comparator, con.rhs)
    return xs


def max_weight_solution(run: Run, p: PresentProblem, D: Optional[FavoredSpace], a, limit: int,
                        outside: bool) -> Optional[tuple]:
    """``max a.y  s.t.  c_hat.y <= limit``, y in X (or X minus D). Returns (value, y)."""
    model = mip.MipModel()
    ys = solution_vars(model, p, D, "notD" if outside else "X", "y")
    model.add_constraint(dict(zip(ys, p.c_hat)), "<=", limit)
    model.set_objective(dict(zip(ys, a)), "max")
    sol = run.solve(model)
    if not sol.optimal:
        return None
    return sol.objective, tuple(sol.assignment[j] for j in ys)


def min_cost_solution(run: Run, p: PresentProblem, D: Optional[FavoredSpace], c, a, b,
                      outside: bool) -> Optional[tuple]:
    """``min c.y  s.t.  a.y >= b``, y in X (or X minus D). Returns (value, y)."""
    model = mip.MipModel()
    ys = solution_vars(model, p, D, "notD" if outside else "X", "y")
    model.add_constraint(dict(zip(ys, a)), ">=", b)
    model.set_objective(dict(zip(ys, c)))
    sol = run.solve(model)
    if not sol.optimal:
        return None
    return sol.objective, tuple(sol.assignment[j] for j in ys)


def big_m(boxes, extra_box=None) -> int:
    """``1 + sum_i max(|lo_i|, |hi_i|)`` (+ the same for one extra interval)."""
    total = 1 + sum(max(abs(l), abs(h)) for l, h in boxes)
    if extra_box is not None:
        total += max(abs(extra_box[0]), abs(extra_box[1]))
    return total

