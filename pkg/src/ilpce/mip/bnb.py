"""Exact branch-and-bound for bounded-integer linear models.

Node relaxations are solved by the dual simplex kernel and warm-started from
the parent basis. A node is discarded only on an integer-arithmetic
certificate (see ``certify``); a node that cannot be certified is split
further, and fully fixed nodes are checked exactly. Floating point therefore
affects speed and tie-breaking, never the verdict.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .. import _kernels
from . import certify
from .model import BudgetExceeded, MipModel, ModelError, Number

DEFAULT_NODE_LIMIT = 10_000_000
INT_TOL = 1e-6
FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9
REFACTOR_AFTER = 200


@dataclass(frozen=True)
class MipSolution:
    status: str  # "Optimal" | "Infeasible"
    assignment: Optional[tuple]
    objective: Optional[Number]
    node_count: int

    @property
    def optimal(self) -> bool:
        return self.status == "Optimal"


def _lcm_den(values) -> int:
    den = 1
    for v in values:
        if isinstance(v, Fraction) and v.denominator != 1:
            den = den * v.denominator // math.gcd(den, v.denominator)
    return den


class _Prepared:
    """Integer-scaled, min-sense copy of a model."""

    def __init__(self, model: MipModel):
        n = model.num_vars
        self.n = n
        self.lo = [v.lower for v in model.variables]
        self.hi = [v.upper for v in model.variables]
        self.binary = np.array([h - l <= 1 for l, h in zip(self.lo, self.hi)], dtype=bool)
        self.trivially_infeasible = False
        rows, rlo, rhi = [], [], []
        for con in model.constraints:
            scale = _lcm_den(list(con.coeffs.values()) + [con.rhs])
            coeffs = {j: int(v * scale) for j, v in con.coeffs.items()}
            rhs = con.rhs * scale
            if not coeffs:
                ok = (
                    (con.comparator == "<=" and 0 <= rhs)
                    or (con.comparator == ">=" and 0 >= rhs)
                    or (con.comparator == "==" and rhs == 0)
                )
                if not ok:
                    self.trivially_infeasible = True
                continue
            row = [0] * n
            for j, v in coeffs.items():
                row[j] = v
            # integral left-hand sides allow rounding the right-hand side inward
            if con.comparator == "<=":
                lo_v, hi_v = None, math.floor(rhs)
            elif con.comparator == ">=":
                lo_v, hi_v = math.ceil(rhs), None
            else:
                if Fraction(rhs).denominator != 1:
                    self.trivially_infeasible = True
                    continue
                lo_v = hi_v = int(rhs)
            rows.append(row)
            rlo.append(lo_v)
            rhi.append(hi_v)
        self.m = len(rows)
        self.rows = certify.RowData(rows, rlo, rhi, n)
        self.rows_list = rows
        self.rlo = rlo
        self.rhi = rhi

        self.obj_scale = _lcm_den(model.objective.values())
        sign = 1 if model.sense == "min" else -1
        self.sign = sign
        c = [0] * n
        for j, v in model.objective.items():
            c[j] = int(v * self.obj_scale) * sign
        self.c_list = c
        self.c = np.array(c, dtype=np.int64) if n else np.zeros(0, dtype=np.int64)
        self.c_peak = max((abs(v) for v in c), default=0)
        self.c_float = np.array(c, dtype=np.float64)

        A = np.array(rows, dtype=np.float64).reshape(self.m, n)
        self.M = np.hstack([A, -np.eye(self.m)]) if self.m else np.zeros((0, n))
        inf = math.inf
        self.row_lo = np.array([-inf if v is None else float(v) for v in rlo])
        self.row_hi = np.array([inf if v is None else float(v) for v in rhi])
        self.c_full = np.concatenate([self.c_float, np.zeros(self.m)])

    def external_value(self, internal: int) -> Number:
        val = Fraction(internal * self.sign, self.obj_scale)
        return int(val) if val.denominator == 1 else val

    def internal_cutoff(self, cutoff) -> int:
        # integer internal objective values strictly above this are pruned
        return math.floor(Fraction(cutoff) * self.obj_scale * self.sign)

    def feasible(self, x: list) -> bool:
        for j in range(self.n):
            if not self.lo[j] <= x[j] <= self.hi[j]:
                return False
        for row, l, h in zip(self.rows_list, self.rlo, self.rhi):
            act = sum(a * v for a, v in zip(row, x) if a)
            if l is not None and act < l:
                return False
            if h is not None and act > h:
                return False
        return True

    def value(self, x: list) -> int:
        return sum(c * v for c, v in zip(self.c_list, x) if c)

    def root_state(self):
        n, m = self.n, self.m
        T = np.hstack([-self.M[:, :n], np.eye(m)]) if m else np.zeros((0, n))
        T = np.ascontiguousarray(T)
        x = np.zeros(n + m)
        d = self.c_full.copy()
        basis = np.arange(n, n + m, dtype=np.int64)
        pos = np.full(n + m, -1, dtype=np.int64)
        pos[n:] = np.arange(m)
        at_upper = (self.c_float < 0).astype(np.uint8)
        at_upper = np.concatenate([at_upper, np.zeros(m, dtype=np.uint8)])
        return [T, x, d, basis, pos, at_upper, 0]

    def refactor(self, state):
        """Rebuild the tableau from the basis to shed accumulated round-off."""
        T, x, d, basis, pos, at_upper, _ = state
        try:
            T_new = np.linalg.solve(self.M[:, basis], self.M)
        except np.linalg.LinAlgError:
            state[:] = self.root_state()
            return
        T[:] = T_new
        d[:] = self.c_full - self.c_full[basis] @ T_new
        state[6] = 0


def solve(model: MipModel, cutoff: Number | None = None, *,
          node_limit: int = DEFAULT_NODE_LIMIT, time_limit: float | None = None,
          deadline: float | None = None, backend: str | None = None) -> MipSolution:
    """Solve ``model`` to proven optimality.

    ``cutoff`` bounds the objective (at most for min, at least for max);
    solutions beyond it may be pruned, so Infeasible then means "nothing at
    least as good as the cutoff". Raises ``BudgetExceeded`` when the node
    limit or time limit runs out, and ``ModelError`` for malformed input.
    """
    for con in model.constraints:
        for j in con.coeffs:
            if not 0 <= j < model.num_vars:
                raise ModelError(f"constraint references unknown variable {j}")
    for j in model.objective:
        if not 0 <= j < model.num_vars:
            raise ModelError(f"objective references unknown variable {j}")
    start = time.perf_counter()
    if time_limit is not None:
        limit = start + time_limit
        deadline = limit if deadline is None else min(deadline, limit)

    prep = _Prepared(model)
    if prep.trivially_infeasible:
        return MipSolution("Infeasible", None, None, 0)
    kern = _kernels.get(backend)
    n, m = prep.n, prep.m

    best_val: Optional[int] = None
    best_x: Optional[list] = None
    if cutoff is not None:
        best_val = prep.internal_cutoff(cutoff) + 1

    lo_full = np.concatenate([np.array(prep.lo, dtype=np.float64), prep.row_lo])
    hi_full = np.concatenate([np.array(prep.hi, dtype=np.float64), prep.row_hi])
    max_iter = 50 * (n + m) + 100

    stack = [(list(prep.lo), list(prep.hi), prep.root_state())]
    nodes = 0
    while stack:
        if nodes >= node_limit:
            raise BudgetExceeded(f"node limit {node_limit} reached")
        if deadline is not None and time.perf_counter() >= deadline:
            raise BudgetExceeded("time limit reached")
        lo, hi, state = stack.pop()
        nodes += 1

        free = [j for j in range(n) if lo[j] < hi[j]]
        if not free:
            if prep.feasible(lo):
                val = prep.value(lo)
                if best_val is None or val < best_val:
                    best_val, best_x = val, list(lo)
            continue

        lo_full[:n] = lo
        hi_full[:n] = hi
        if state[6] > REFACTOR_AFTER:
            prep.refactor(state)
        T, x, d, basis, pos, at_upper, pivots = state
        status, iters, row = kern.dual_simplex(
            T, x, d, basis, pos, at_upper, lo_full, hi_full, max_iter, FEAS_TOL, PIVOT_TOL
        )
        state[6] = pivots + iters

        branch_var = None
        if status == 1:
            g = -T[row, n:]
            if certify.proves_infeasible(prep.rows, g, lo, hi):
                continue
        elif status == 0:
            y = d[n:]
            bound = certify.lower_bound(prep.rows, prep.c, prep.c_peak, y, lo, hi)
            if bound is not None and best_val is not None and bound >= best_val:
                continue
            xs = x[:n]
            frac = np.abs(xs - np.rint(xs))
            if frac.max(initial=0.0) <= INT_TOL:
                xi = [min(max(int(v), l), h) for v, l, h in zip(np.rint(xs).tolist(), lo, hi)]
                if prep.feasible(xi):
                    val = prep.value(xi)
                    if best_val is None or val < best_val:
                        best_val, best_x = val, xi
                if bound is not None and best_val is not None and bound >= best_val:
                    continue
            else:
                f = xs - np.floor(xs)
                score = np.minimum(f, 1.0 - f)
                # binaries before general integers, most fractional first
                score = np.where(prep.binary & (score > INT_TOL), score + 1.0, score)
                j = int(np.argmax(score))
                if score[j] > INT_TOL:
                    branch_var = j

        if branch_var is not None:
            v = float(x[branch_var])
            split = math.floor(v)
            up_first = v - split > 0.5
            # recompute in case floating noise put v outside the node box
            split = min(max(split, lo[branch_var]), hi[branch_var] - 1)
        else:
            # uncertified node: split the lowest free variable in half
            branch_var = free[0]
            split = (lo[branch_var] + hi[branch_var]) // 2
            up_first = False

        down_hi = list(hi)
        down_hi[branch_var] = split
        up_lo = list(lo)
        up_lo[branch_var] = split + 1
        down = (lo, down_hi)
        up = (up_lo, hi)
        first, second = (up, down) if up_first else (down, up)
        stack.append((second[0], second[1], _copy_state(state)))
        stack.append((first[0], first[1], state))

    if best_x is None:
        return MipSolution("Infeasible", None, None, nodes)
    return MipSolution("Optimal", tuple(best_x), prep.external_value(best_val), nodes)


def _copy_state(state):
    T, x, d, basis, pos, at_upper, pivots = state
    return [T.copy(), x.copy(), d.copy(), basis.copy(), pos.copy(), at_upper.copy(), pivots]
