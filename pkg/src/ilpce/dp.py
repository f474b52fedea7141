"""Pseudo-polynomial dynamic program for covering knapsacks with side constraints.

Solves ``min c.x  s.t.  a.x >= b,  q_t.x >= p_t (t = 1..T),  x binary`` with
nonnegative ``a`` and ``q``. States are the coverage of each row clamped at
its right-hand side, so the table has ``(b+1) * prod(p_t+1)`` cells and one
pass over the items touches each cell once per item.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .model import LinearConstraint, PresentProblem


class UnsupportedInput(ValueError):
    """Input outside what the DP can handle (negative coefficients, extra rows)."""


def _rows(constraints, n: int) -> list:
    rows = []
    for con in constraints:
        if isinstance(con, LinearConstraint):
            if con.comparator != ">=":
                raise UnsupportedInput("the DP handles '>=' side constraints only")
            q, rhs = con.coeffs, con.rhs
        else:
            q, rhs = con
        q = [int(v) for v in q]
        if len(q) != n:
            raise ValueError(f"side constraint has {len(q)} coefficients, expected {n}")
        rows.append((q, int(rhs)))
    return rows


def dp_restricted_min(p: PresentProblem, constraints: Sequence = (), b: Optional[int] = None, *,
                      return_ops: bool = False, backend: Optional[str] = None):
    """Minimum ``c_hat.x`` with ``a_hat.x >= b`` and every ``q.x >= rhs`` in ``constraints``.

    ``constraints`` holds ``(q, rhs)`` pairs or ``>=`` :class:`LinearConstraint`
    objects. ``b`` defaults to ``p.b_hat``. Returns None when infeasible; with
    ``return_ops`` returns ``(value, cell_updates)``.
    """
    if p.immutable:
        raise UnsupportedInput("the DP does not handle immutable constraints")
    b = p.b_hat if b is None else int(b)
    rows = _rows(constraints, p.n)
    if any(v < 0 for v in p.a_hat) or any(v < 0 for q, _ in rows for v in q):
        raise UnsupportedInput("the DP needs nonnegative constraint coefficients")
    contrib = np.array([list(p.a_hat)] + [q for q, _ in rows], dtype=np.int64).T
    contrib = np.ascontiguousarray(contrib.reshape(p.n, 1 + len(rows)))
    caps = np.array([max(b, 0)] + [max(r, 0) for _, r in rows], dtype=np.int64)
    cost = np.array(p.c_hat, dtype=np.int64)
    big = int(np.abs(cost).sum()) + 1
    best, ops = _kernels.get(backend).cover_dp(cost, contrib, caps, big)
    value = None if best >= big else int(best)
    return (value, int(ops)) if return_ops else value
