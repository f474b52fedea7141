"""Optimal weak counterfactual explanations.

All four mutability modes are covered: objective-only and all-parameter
modes run a single constraint-generation loop; constraint-only mode sweeps
the candidate optimal values ``v`` of the favored solution and solves one
master problem per value, stopping early once the value-indexed lower bound
reaches the incumbent; right-hand-side-only mode enumerates ``b`` by distance.

The helpers take a ``strong`` flag so that :mod:`ilpce.strong` can reuse the
same loops with complement-restricted separation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import mip
from ._formulations import (
    CutPool,
    ParamVector,
    Run,
    add_row,
    big_m,
    max_weight_solution,
    merge,
    min_cost_solution,
    scale,
    solution_vars,
)
from .dp import UnsupportedInput, dp_restricted_min
from .model import (
    CeResult,
    Distance,
    FavoredSpace,
    MutableSpace,
    Params,
    PresentProblem,
    check_strong,
    check_weak,
)

__all__ = [
    "CutPool",
    "MasterResult",
    "ValueRange",
    "dp_restricted_min",
    "lower_bound",
    "solve",
    "solve_all_mutable",
    "solve_constraint_mutable",
    "solve_master",
    "solve_objective_mutable",
    "solve_rhs_enumeration",
    "value_range",
]


@dataclass(frozen=True)
class ValueRange:
    c_lo: int
    c_hi: int

    def __len__(self) -> int:
        return self.c_hi - self.c_lo + 1

    def __iter__(self):
        return iter(range(self.c_lo, self.c_hi + 1))


@dataclass(frozen=True)
class MasterResult:
    a: tuple
    b: int
    x: tuple
    cost: int


def _check(strong: bool):
    return check_strong if strong else check_weak


def _present_result(p, D, strong, run, kind, mode) -> Optional[CeResult]:
    """Zero-cost answer when the present parameters already qualify."""
    res = _check(strong)(p, D, p.params, deadline=run.deadline)
    run.stats.subproblem_solves += 2 if not strong else 3
    if res.yes:
        return CeResult("Optimal", p.params, 0, res.witness, run.finish(), kind, mode)
    return None


# --- value range ----------------------------------------------------------------

def value_range(p: PresentProblem, D: FavoredSpace, H: MutableSpace, *,
                run: Optional[Run] = None) -> Optional[ValueRange]:
    """Bounds on the optimal value of a favored solution over all reachable (a, b).

    Uses the largest weights and the smallest right-hand side in the box.
    Returns None when no favored solution is feasible for any (a, b).
    """
    run = run or Run()
    bounds = []
    for sense in ("min", "max"):
        model = mip.MipModel()
        xs = solution_vars(model, p, D, "D")
        model.add_constraint(dict(zip(xs, H.a_max)), ">=", H.b_min)
        model.set_objective(dict(zip(xs, p.c_hat)), sense)
        sol = run.solve(model)
        if not sol.optimal:
            return None
        bounds.append(sol.objective)
    return ValueRange(bounds[0], bounds[1])


# --- constraint-mutable pieces --------------------------------------------------

def _cut_limit(v: int, strong: bool) -> int:
    # weak: solutions strictly cheaper than v; strong: non-favored ones up to v
    return v if strong else v - 1


def _ab_vars(model, p: PresentProblem, H: MutableSpace, dist: Distance):
    a = ParamVector(model, "a", H.a_box)
    b = ParamVector(model, "b", (H.b_box,))
    objective = merge(a.deviation(p.a_hat, dist.wa(p.n)), b.deviation((p.b_hat,), (dist.b_weight,)))
    return a, b, objective


def _add_exclusion(model, a: ParamVector, b: ParamVector, y) -> None:
    """``a.y <= b - 1``: the solution y is cut off."""
    ay, ay0 = a.linear(y)
    bb, b0 = b.linear((1,))
    add_row(model, merge(ay, scale(bb, -1)), ay0 - b0, "<=", -1)


def lower_bound(v_bar: int, p: PresentProblem, H: MutableSpace, dist: Distance = Distance(), *,
                D: Optional[FavoredSpace] = None, strong: bool = False,
                pool: Optional[CutPool] = None, run: Optional[Run] = None) -> float:
    """Cheapest (a, b) that cuts off every solution cheaper than ``v_bar``.

    With ``strong`` the cut set is the non-favored solutions of value at most
    ``v_bar`` (``D`` required). Returns ``math.inf`` when no (a, b) in the box
    does it. The bound is non-decreasing in ``v_bar``.
    """
    if strong and D is None:
        raise ValueError("the strong lower bound needs the favored space")
    run = run or Run()
    pool = pool if pool is not None else CutPool()
    limit = _cut_limit(v_bar, strong)
    cuts = pool.upto(limit)
    added = 0
    try:
        while True:
            model = mip.MipModel()
            a, b, objective = _ab_vars(model, p, H, dist)
            for y in cuts:
                _add_exclusion(model, a, b, y)
            model.set_objective(objective)
            sol = run.solve(model)
            if not sol.optimal:
                return math.inf
            a_t = a.values(sol.assignment)
            b_t = b.values(sol.assignment)[0]
            sep = max_weight_solution(run, p, D, a_t, limit, outside=strong)
            if sep is None or sep[0] < b_t:
                return sol.objective
            y = sep[1]
            if not pool.add(y, _dot(p.c_hat, y)):
                raise AssertionError("separation returned a solution already cut off")
            cuts.append(y)
            added += 1
    finally:
        run.stats.cuts_per_subproblem.append(added)


def solve_master(v: int, p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                 dist: Distance = Distance(), incumbent_cost: Optional[int] = None, *,
                 strong: bool = False, pool: Optional[CutPool] = None,
                 run: Optional[Run] = None) -> Optional[MasterResult]:
    """Cheapest (a, b) making a favored solution of present value ``v`` optimal.

    Solutions ``incumbent_cost`` or more expensive are cut off. Returns None
    when no such (a, b) exists.
    """
    run = run or Run()
    pool = pool if pool is not None else CutPool()
    limit = _cut_limit(v, strong)
    cuts = pool.upto(limit)
    added = 0
    try:
        while True:
            model = mip.MipModel()
            a, b, objective = _ab_vars(model, p, H, dist)
            xs = solution_vars(model, p, D, "D")
            model.add_constraint(dict(zip(xs, p.c_hat)), "==", v)
            ax, ax0 = a.times(xs)
            bb, b0 = b.linear((1,))
            add_row(model, merge(ax, scale(bb, -1)), ax0 - b0, ">=", 0)
            for y in cuts:
                _add_exclusion(model, a, b, y)
            model.set_objective(objective)
            sol = run.solve(model, cutoff=incumbent_cost)
            if not sol.optimal:
                return None
            a_t = a.values(sol.assignment)
            b_t = b.values(sol.assignment)[0]
            sep = max_weight_solution(run, p, D, a_t, limit, outside=strong)
            if sep is None or sep[0] < b_t:
                x = tuple(sol.assignment[j] for j in xs)
                return MasterResult(a_t, b_t, x, sol.objective)
            y = sep[1]
            if not pool.add(y, _dot(p.c_hat, y)):
                raise AssertionError("separation returned a solution already cut off")
            cuts.append(y)
            added += 1
    finally:
        run.stats.cuts_per_subproblem.append(added)


def _dot(u, v) -> int:
    return sum(x * y for x, y in zip(u, v))


def constraint_sweep(p: PresentProblem, D: FavoredSpace, H: MutableSpace, dist: Distance, *,
                     strong: bool, use_lower_bound: bool = True,
                     time_limit: Optional[float] = None, precheck: bool = True) -> CeResult:
    kind = "strong" if strong else "weak"
    run = Run(time_limit)
    run.stats.lower_bound_enabled = use_lower_bound
    best: Optional[MasterResult] = None
    d_star = math.inf
    try:
        if precheck:
            found = _present_result(p, D, strong, run, kind, H.mode)
            if found is not None:
                return found
        vr = value_range(p, D, H, run=run)
        if vr is None:
            return CeResult("Infeasible", stats=run.finish(), kind=kind, mode=H.mode)
        run.stats.value_range = (vr.c_lo, vr.c_hi)
        pool = CutPool()
        for v in vr:
            lb = None
            if use_lower_bound:
                lb = lower_bound(v, p, H, dist, D=D, strong=strong, pool=pool, run=run)
                run.stats.trace.append((v, None if best is None else d_star, lb))
                if lb >= d_star:
                    break
            run.stats.values_examined.append(v)
            cutoff = None if best is None else d_star - 1
            res = solve_master(v, p, D, H, dist, cutoff, strong=strong, pool=pool, run=run)
            if res is not None and res.cost < d_star:
                best, d_star = res, res.cost
            if not use_lower_bound:
                run.stats.trace.append((v, None if best is None else d_star, None))
    except mip.BudgetExceeded:
        params = None if best is None else Params(p.c_hat, best.a, best.b)
        return CeResult("BudgetExceeded", params, None if best is None else best.cost,
                        None if best is None else best.x, run.finish(), kind, H.mode)
    if best is None:
        return CeResult("Infeasible", stats=run.finish(), kind=kind, mode=H.mode)
    return CeResult("Optimal", Params(p.c_hat, best.a, best.b), best.cost, best.x,
                    run.finish(), kind, H.mode)


def solve_constraint_mutable(p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                             dist: Distance = Distance(), *, use_lower_bound: bool = True,
                             time_limit: Optional[float] = None) -> CeResult:
    """Optimal weak CE when only the constraint row and right-hand side may change."""
    if H.mode not in ("constraint", "rhs"):
        raise ValueError("solve_constraint_mutable needs mode 'constraint' (or 'rhs')")
    return constraint_sweep(p, D, H, dist, strong=False, use_lower_bound=use_lower_bound,
                            time_limit=time_limit)


# --- objective-mutable and all-mutable loops ----------------------------------

def objective_loop(p: PresentProblem, D: FavoredSpace, H: MutableSpace, dist: Distance, *,
                   strong: bool, time_limit: Optional[float] = None) -> CeResult:
    kind = "strong" if strong else "weak"
    run = Run(time_limit)
    run.stats.lower_bound_enabled = False
    margin = 1 if strong else 0
    cuts: list = []
    incumbent = None
    try:
        while True:
            model = mip.MipModel()
            c = ParamVector(model, "c", H.c_box)
            xs = solution_vars(model, p, D, "D")
            model.add_constraint(dict(zip(xs, p.a_hat)), ">=", p.b_hat)
            cx, cx0 = c.times(xs)
            for y in cuts:
                cy, cy0 = c.linear(y)
                # c.x <= c.y - margin
                add_row(model, merge(cx, scale(cy, -1)), cx0 - cy0, "<=", -margin)
            model.set_objective(c.deviation(p.c_hat, dist.wc(p.n)))
            sol = run.solve(model)
            if not sol.optimal:
                return CeResult("Infeasible", stats=run.finish(), kind=kind, mode=H.mode)
            c_t = c.values(sol.assignment)
            x_t = tuple(sol.assignment[j] for j in xs)
            incumbent = (c_t, x_t, sol.objective)
            sep = min_cost_solution(run, p, D, c_t, p.a_hat, p.b_hat, outside=strong)
            if sep is None or sep[0] >= _dot(c_t, x_t) + margin:
                break
            if sep[1] in cuts:
                raise AssertionError("separation returned a solution already cut off")
            cuts.append(sep[1])
    except mip.BudgetExceeded:
        return CeResult("BudgetExceeded", stats=run.finish(), kind=kind, mode=H.mode)
    finally:
        run.stats.cuts_per_subproblem.append(len(cuts))
    c_t, x_t, cost = incumbent
    return CeResult("Optimal", Params(c_t, p.a_hat, p.b_hat), cost, x_t, run.finish(), kind, H.mode)


def solve_objective_mutable(p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                            dist: Distance = Distance(), *,
                            time_limit: Optional[float] = None) -> CeResult:
    """Optimal weak CE when only objective coefficients may change."""
    if H.mode != "objective":
        raise ValueError("solve_objective_mutable needs mode 'objective'")
    return objective_loop(p, D, H, dist, strong=False, time_limit=time_limit)


def all_mutable_loop(p: PresentProblem, D: FavoredSpace, H: MutableSpace, dist: Distance, *,
                     strong: bool, time_limit: Optional[float] = None) -> CeResult:
    kind = "strong" if strong else "weak"
    run = Run(time_limit)
    run.stats.lower_bound_enabled = False
    margin = 1 if strong else 0
    m_feas = big_m(H.a_box, H.b_box)
    m_obj = big_m(H.c_box) + margin
    cuts: list = []
    incumbent = None
    try:
        while True:
            model = mip.MipModel()
            c = ParamVector(model, "c", H.c_box)
            a = ParamVector(model, "a", H.a_box)
            b = ParamVector(model, "b", (H.b_box,))
            objective = merge(
                c.deviation(p.c_hat, dist.wc(p.n)),
                a.deviation(p.a_hat, dist.wa(p.n)),
                b.deviation((p.b_hat,), (dist.b_weight,)),
            )
            xs = solution_vars(model, p, D, "D")
            cx, cx0 = c.times(xs)
            ax, ax0 = a.times(xs)
            bb, b0 = b.linear((1,))
            add_row(model, merge(ax, scale(bb, -1)), ax0 - b0, ">=", 0)
            for k, y in enumerate(cuts):
                z = model.add_binary(f"z{k}")
                cy, cy0 = c.linear(y)
                ay, ay0 = a.linear(y)
                # value row: c.x <= c.y - margin + M z
                add_row(model, merge(cx, scale(cy, -1), {z: -m_obj}), cx0 - cy0, "<=", -margin)
                # z = 0 iff y feasible: a.y >= b - M z  and  a.y <= b - 1 + M (1 - z)
                feas = merge(ay, scale(bb, -1), {z: m_feas})
                add_row(model, feas, ay0 - b0, ">=", 0)
                add_row(model, feas, ay0 - b0, "<=", m_feas - 1)
            model.set_objective(objective)
            sol = run.solve(model)
            if not sol.optimal:
                return CeResult("Infeasible", stats=run.finish(), kind=kind, mode=H.mode)
            c_t = c.values(sol.assignment)
            a_t = a.values(sol.assignment)
            b_t = b.values(sol.assignment)[0]
            x_t = tuple(sol.assignment[j] for j in xs)
            incumbent = (Params(c_t, a_t, b_t), x_t, sol.objective)
            sep = min_cost_solution(run, p, D, c_t, a_t, b_t, outside=strong)
            if sep is None or sep[0] >= _dot(c_t, x_t) + margin:
                break
            if sep[1] in cuts:
                raise AssertionError("separation returned a solution already cut off")
            cuts.append(sep[1])
    except mip.BudgetExceeded:
        return CeResult("BudgetExceeded", stats=run.finish(), kind=kind, mode=H.mode)
    finally:
        run.stats.cuts_per_subproblem.append(len(cuts))
    params, x_t, cost = incumbent
    return CeResult("Optimal", params, cost, x_t, run.finish(), kind, H.mode)


def solve_all_mutable(p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                      dist: Distance = Distance(), *,
                      time_limit: Optional[float] = None) -> CeResult:
    """Optimal weak CE when objective, constraint row and right-hand side may change."""
    return all_mutable_loop(p, D, H, dist, strong=False, time_limit=time_limit)


# --- right-hand side enumeration -------------------------------------------------

def _dp_applicable(p: PresentProblem, D: FavoredSpace) -> bool:
    return (
        not p.immutable
        and all(v >= 0 for v in p.a_hat)
        and D.kind in ("fix+", "atleast")
    )


def _dp_family(p: PresentProblem, D: FavoredSpace) -> list:
    if D.kind == "atleast":
        return [(D.alpha, D.beta)]
    rows = []
    for i in D.indices:
        q = [0] * p.n
        q[i] = 1
        rows.append((tuple(q), 1))
    return rows


def rhs_order(b_hat: int, b_box: tuple) -> list:
    """Right-hand sides in the box by distance from ``b_hat``, smaller first on ties."""
    lo, hi = b_box
    return sorted(range(lo, hi + 1), key=lambda b: (abs(b - b_hat), b))


def solve_rhs_enumeration(p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                          dist: Distance = Distance(), *, method: str = "auto",
                          time_limit: Optional[float] = None) -> CeResult:
    """Optimal weak CE when only ``b`` may change, by visiting ``b`` in distance order.

    ``method`` selects the per-value check: "mip", "dp" (knapsack form only)
    or "auto" (dp when applicable).
    """
    if H.mode != "rhs":
        raise ValueError("solve_rhs_enumeration needs mode 'rhs'")
    run = Run(time_limit)
    run.stats.lower_bound_enabled = False
    use_dp = method == "dp" or (method == "auto" and _dp_applicable(p, D))
    if use_dp and not _dp_applicable(p, D):
        raise UnsupportedInput("the DP check needs X = {0,1}^n, a >= 0 and an at-least family")
    family = _dp_family(p, D) if use_dp else None
    try:
        for b in rhs_order(p.b_hat, H.b_box):
            run.stats.values_examined.append(b)
            params = Params(p.c_hat, p.a_hat, b)
            if use_dp:
                run.stats.subproblem_solves += 2
                full = dp_restricted_min(p, [], b)
                fav = dp_restricted_min(p, family, b) if full is not None else None
                if full is not None and fav == full:
                    res = check_weak(p, D, params, deadline=run.deadline)
                    witness = res.witness
                    if not res.yes:
                        raise AssertionError("DP and solver disagree on a weak CE check")
                else:
                    continue
            else:
                res = check_weak(p, D, params, deadline=run.deadline)
                run.stats.subproblem_solves += 2
                if not res.yes:
                    continue
                witness = res.witness
            cost = dist.b_weight * abs(b - p.b_hat)
            return CeResult("Optimal", params, cost, witness, run.finish(), "weak", H.mode)
    except mip.BudgetExceeded:
        return CeResult("BudgetExceeded", stats=run.finish(), kind="weak", mode=H.mode)
    return CeResult("Infeasible", stats=run.finish(), kind="weak", mode=H.mode)


def solve(p: PresentProblem, D: FavoredSpace, H: MutableSpace, dist: Distance = Distance(), *,
          use_lower_bound: bool = True, time_limit: Optional[float] = None) -> CeResult:
    """Dispatch on the mutability mode."""
    D.check_size(p.n)
    H.validate(p)
    if H.mode == "objective":
        return solve_objective_mutable(p, D, H, dist, time_limit=time_limit)
    if H.mode == "constraint":
        return solve_constraint_mutable(p, D, H, dist, use_lower_bound=use_lower_bound,
                                        time_limit=time_limit)
    if H.mode == "rhs":
        return solve_rhs_enumeration(p, D, H, dist, time_limit=time_limit)
    return solve_all_mutable(p, D, H, dist, time_limit=time_limit)
