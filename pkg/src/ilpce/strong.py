"""Optimal strong counterfactual explanations.

Same loops as :mod:`ilpce.weak`, but separation runs over solutions outside
the favored space, and those solutions must end up strictly worse than the
favored optimum (or infeasible). In the value sweep this means non-favored
solutions of value ``v`` itself are cut off as well.
"""

from __future__ import annotations

from typing import Optional

from . import weak
from .model import CeResult, Distance, FavoredSpace, MutableSpace, PresentProblem
from .weak import CutPool, MasterResult

__all__ = [
    "lower_bound_strong",
    "solve",
    "solve_all_mutable_strong",
    "solve_constraint_mutable_strong",
    "solve_master_strong",
    "solve_objective_mutable_strong",
    "solve_rhs_strong",
]


def solve_objective_mutable_strong(p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                                   dist: Distance = Distance(), *,
                                   time_limit: Optional[float] = None) -> CeResult:
    """Optimal strong CE when only objective coefficients may change."""
    if H.mode != "objective":
        raise ValueError("solve_objective_mutable_strong needs mode 'objective'")
    return weak.objective_loop(p, D, H, dist, strong=True, time_limit=time_limit)


def solve_master_strong(v: int, p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                        dist: Distance = Distance(), incumbent_cost: Optional[int] = None, *,
                        pool: Optional[CutPool] = None, run=None) -> Optional[MasterResult]:
    """Cheapest (a, b) making a favored solution of value ``v`` the unique kind of optimum."""
    return weak.solve_master(v, p, D, H, dist, incumbent_cost, strong=True, pool=pool, run=run)


def lower_bound_strong(v_bar: int, p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                       dist: Distance = Distance(), *, pool: Optional[CutPool] = None,
                       run=None) -> float:
    """Cheapest (a, b) cutting off every non-favored solution of value at most ``v_bar``."""
    return weak.lower_bound(v_bar, p, H, dist, D=D, strong=True, pool=pool, run=run)


def solve_constraint_mutable_strong(p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                                    dist: Distance = Distance(), *, use_lower_bound: bool = True,
                                    time_limit: Optional[float] = None) -> CeResult:
    """Optimal strong CE when only the constraint row and right-hand side may change."""
    if H.mode not in ("constraint", "rhs"):
        raise ValueError("solve_constraint_mutable_strong needs mode 'constraint' (or 'rhs')")
    return weak.constraint_sweep(p, D, H, dist, strong=True, use_lower_bound=use_lower_bound,
                                 time_limit=time_limit)


def solve_rhs_strong(p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                     dist: Distance = Distance(), *, use_lower_bound: bool = True,
                     time_limit: Optional[float] = None) -> CeResult:
    """Strong CE when only ``b`` may change: the constraint sweep with a fixed row."""
    if H.mode != "rhs":
        raise ValueError("solve_rhs_strong needs mode 'rhs'")
    return solve_constraint_mutable_strong(p, D, H, dist, use_lower_bound=use_lower_bound,
                                           time_limit=time_limit)


def solve_all_mutable_strong(p: PresentProblem, D: FavoredSpace, H: MutableSpace,
                             dist: Distance = Distance(), *,
                             time_limit: Optional[float] = None) -> CeResult:
    """Optimal strong CE when every parameter may change."""
    return weak.all_mutable_loop(p, D, H, dist, strong=True, time_limit=time_limit)


def solve(p: PresentProblem, D: FavoredSpace, H: MutableSpace, dist: Distance = Distance(), *,
          use_lower_bound: bool = True, time_limit: Optional[float] = None) -> CeResult:
    """Dispatch on the mutability mode."""
    D.check_size(p.n)
    H.validate(p)
    if H.mode == "objective":
        return solve_objective_mutable_strong(p, D, H, dist, time_limit=time_limit)
    if H.mode == "constraint":
        return solve_constraint_mutable_strong(p, D, H, dist, use_lower_bound=use_lower_bound,
                                               time_limit=time_limit)
    if H.mode == "rhs":
        return solve_rhs_strong(p, D, H, dist, use_lower_bound=use_lower_bound,
                                time_limit=time_limit)
    return solve_all_mutable_strong(p, D, H, dist, time_limit=time_limit)
