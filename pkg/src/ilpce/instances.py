"""Instance input/output, synthetic generators and favored/mutable space builders.

Knapsack files in the kplib layout are read as cover problems: item profits
become costs, the capacity becomes the demand, and the problem is
``min c.x  s.t.  a.x >= b``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import mip
from .model import FavoredSpace, LinearConstraint, MutableSpace, PresentProblem

FORMATS = ("profit-weight", "weight-profit")
CORRELATIONS = ("uncorrelated", "strong")
FAVORED_KINDS = ("D+", "D-", "D>=")
BASES = ("range", "coefficient")
DEFAULT_RANGE = 1000
INSTANCE_FORMAT = "ilpce-instance"
INSTANCE_VERSION = 1


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(frozen=True)
class RawKnapsackInstance:
    n: int
    capacity: int
    items: tuple  # (profit, weight) pairs

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if len(self.items) != self.n:
            raise ValueError(f"expected {self.n} items, got {len(self.items)}")
        if self.capacity < 0 or any(v < 0 for item in self.items for v in item):
            raise ValueError("entries must be nonnegative")


# --- kplib text ---------------------------------------------------------------------

def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_kplib(text: str, fmt: str = "profit-weight") -> RawKnapsackInstance:
    """Parse ``n``, capacity, then ``n`` lines of two integers. Blank lines are skipped."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    lines = [(k, ln.split()) for k, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if len(lines) < 2:
        raise ParseError("missing header: expected item count and capacity")
    header = []
    for lineno, tokens in lines[:2]:
        if len(tokens) != 1:
            raise ParseError(f"expected one integer, got {len(tokens)} tokens", lineno)
        header.append(_ints(tokens, lineno)[0])
    n, capacity = header
    if n < 1:
        raise ParseError("item count must be positive", lines[0][0])
    if capacity < 0:
        raise ParseError("capacity must be nonnegative", lines[1][0])
    body = lines[2:]
    if len(body) < n:
        raise ParseError(f"item-count mismatch: header says {n}, found {len(body)} item lines")
    if len(body) > n:
        raise ParseError("trailing content after the last item", body[n][0])
    items = []
    for lineno, tokens in body:
        if len(tokens) != 2:
            raise ParseError(f"expected two integers, got {len(tokens)} tokens", lineno)
        first, second = _ints(tokens, lineno)
        if first < 0 or second < 0:
            raise ParseError("entries must be nonnegative", lineno)
        items.append((first, second) if fmt == "profit-weight" else (second, first))
    return RawKnapsackInstance(n, capacity, tuple(items))


def serialize_kplib(raw: RawKnapsackInstance, fmt: str = "profit-weight") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    rows = [str(raw.n), str(raw.capacity)]
    for profit, weight in raw.items:
        pair = (profit, weight) if fmt == "profit-weight" else (weight, profit)
        rows.append(f"{pair[0]} {pair[1]}")
    return "\n".join(rows) + "\n"


def to_cover(raw: RawKnapsackInstance) -> PresentProblem:
    return PresentProblem(
        tuple(p for p, _ in raw.items), tuple(w for _, w in raw.items), raw.capacity
    )


def present_solution(p: PresentProblem, deadline=None) -> Optional[mip.MipSolution]:
    """Optimal solution of the present problem, or None when it is infeasible."""
    model = mip.MipModel()
    xs = [model.add_binary(f"x{i}") for i in range(p.n)]
    model.add_constraint(dict(zip(xs, p.a_hat)), ">=", p.b_hat)
    for con in p.immutable:
        model.add_constraint(dict(zip(xs, con.coeffs)), con.comparator, con.rhs)
    model.set_objective(dict(zip(xs, p.c_hat)))
    sol = mip.solve(model, deadline=deadline)
    return sol if sol.optimal else None


# --- generator ----------------------------------------------------------------------

def generate(n: int, R: int = DEFAULT_RANGE, correlation: str = "uncorrelated",
             seed: int = 0) -> RawKnapsackInstance:
    """Random cover instance: weights in [1, R]; demand is half the total weight.

    Costs are uniform in [1, R] (uncorrelated) or weight + R/10 (strong).
    """
    if n < 1:
        raise ValueError("n must be positive")
    if R < 10:
        raise ValueError("R must be at least 10")
    if correlation not in CORRELATIONS:
        raise ValueError(f"correlation must be one of {CORRELATIONS}")
    rng = np.random.default_rng(seed)
    weights = rng.integers(1, R, size=n, endpoint=True)
    if correlation == "strong":
        costs = weights + R // 10
    else:
        costs = rng.integers(1, R, size=n, endpoint=True)
    total = int(weights.sum())
    # half the total weight, halves rounded up
    demand = (total + 1) // 2
    items = tuple((int(c), int(w)) for c, w in zip(costs, weights))
    return RawKnapsackInstance(n, demand, items)


# --- favored and mutable spaces -------------------------------------------------------

def fixation_count(p: PresentProblem) -> int:
    """``ceil(0.1 * b_hat / mean(a_hat))``, computed exactly."""
    total = sum(p.a_hat)
    if p.b_hat <= 0:
        return 0
    if total <= 0:
        raise ValueError("fixation count needs a positive total weight")
    return math.ceil(Fraction(p.b_hat * p.n, 10 * total))


def build_favored(p: PresentProblem, kind: str, seed: int = 0,
                  present_x: Optional[tuple] = None) -> FavoredSpace:
    """Random favored space of the given kind.

    ``D+`` fixes items outside the present solution to 1, ``D-`` fixes items
    inside it to 0, ``D>=`` asks for at least one of ceil(n/10) random items.
    """
    if kind not in FAVORED_KINDS:
        raise ValueError(f"kind must be one of {FAVORED_KINDS}")
    rng = np.random.default_rng(seed)
    if kind == "D>=":
        k = math.ceil(p.n / 10)
        chosen = sorted(int(i) for i in rng.choice(p.n, size=k, replace=False))
        alpha = [0] * p.n
        for i in chosen:
            alpha[i] = 1
        return FavoredSpace.at_least(alpha, 1)
    if present_x is None:
        sol = present_solution(p)
        if sol is None:
            raise ValueError("the present problem is infeasible, no present solution to contrast")
        present_x = sol.assignment
    k = fixation_count(p)
    want = 0 if kind == "D+" else 1
    candidates = [i for i, v in enumerate(present_x) if v == want]
    if k > len(candidates):
        raise ValueError(
            f"{kind} needs {k} candidate items but only {len(candidates)} are available "
            f"(shortfall {k - len(candidates)})"
        )
    chosen = sorted(int(i) for i in rng.choice(candidates, size=k, replace=False)) if k else []
    return FavoredSpace.positive(chosen) if kind == "D+" else FavoredSpace.negative(chosen)


def _half_width(value: int, pct: Fraction, basis: str, R: int) -> int:
    scale = R if basis == "range" else abs(value)
    return math.ceil(pct * scale)


def build_mutable(p: PresentProblem, mode: str, pct=5, basis: str = "range", *,
                  R: int = DEFAULT_RANGE, mutable_b: Optional[bool] = None) -> MutableSpace:
    """Boxes of +-pct% around the present values.

    ``basis="range"`` uses ceil(pct% of R) for every coefficient,
    ``basis="coefficient"`` uses ceil(pct% of |value|). Weights are clamped at
    zero. In constraint mode the right-hand side stays fixed unless
    ``mutable_b`` is set.
    """
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}")
    pct = Fraction(str(pct)) / 100
    if pct < 0:
        raise ValueError("pct must be nonnegative")

    def box(v, clamp=False):
        h = _half_width(v, pct, basis, R)
        lo = v - h
        if clamp:
            lo = max(lo, 0) if v >= 0 else lo
        return (lo, v + h)

    c_box = tuple(box(v) for v in p.c_hat)
    a_box = tuple(box(v, clamp=True) for v in p.a_hat)
    b_box = box(p.b_hat)
    if mutable_b is None:
        mutable_b = mode in ("rhs", "all")
    if not mutable_b:
        b_box = (p.b_hat, p.b_hat)
    if mode == "rhs" and not mutable_b:
        raise ValueError("rhs mode needs a mutable right-hand side")
    return MutableSpace.build(p, mode, c_box=c_box, a_box=a_box, b_box=b_box)


# --- native instance files ------------------------------------------------------------

def favored_to_dict(D: FavoredSpace) -> dict:
    if D.kind == "atleast":
        return {"kind": D.kind, "alpha": list(D.alpha), "beta": D.beta}
    return {"kind": D.kind, "indices": list(D.indices)}


def favored_from_dict(d: dict) -> FavoredSpace:
    if d["kind"] == "atleast":
        return FavoredSpace.at_least(d["alpha"], d["beta"])
    if d["kind"] == "fix+":
        return FavoredSpace.positive(d["indices"])
    if d["kind"] == "fix-":
        return FavoredSpace.negative(d["indices"])
    raise ValueError(f"unknown favored space kind {d['kind']!r}")


def mutable_to_dict(H: MutableSpace) -> dict:
    return {
        "mode": H.mode,
        "c_box": [list(b) for b in H.c_box],
        "a_box": [list(b) for b in H.a_box],
        "b_box": list(H.b_box),
    }


def mutable_from_dict(d: dict) -> MutableSpace:
    return MutableSpace(d["mode"], tuple(map(tuple, d["c_box"])), tuple(map(tuple, d["a_box"])),
                        tuple(d["b_box"]))


def dump_instance(p: PresentProblem, favored: Optional[FavoredSpace] = None,
                  mutable: Optional[MutableSpace] = None, **meta) -> str:
    """Self-describing JSON text for a present problem and optional spaces."""
    doc = {
        "format": INSTANCE_FORMAT,
        "version": INSTANCE_VERSION,
        "n": p.n,
        "c": list(p.c_hat),
        "a": list(p.a_hat),
        "b": p.b_hat,
        "immutable": [
            {"coeffs": list(con.coeffs), "comparator": con.comparator, "rhs": con.rhs}
            for con in p.immutable
        ],
    }
    if favored is not None:
        doc["favored"] = favored_to_dict(favored)
    if mutable is not None:
        doc["mutable"] = mutable_to_dict(mutable)
    if meta:
        doc["meta"] = meta
    return json.dumps(doc, indent=1) + "\n"


def load_instance(text: str):
    """Parse a native instance. Returns (problem, favored or None, mutable or None, meta)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err.msg}", err.lineno) from None
    if not isinstance(doc, dict) or doc.get("format") != INSTANCE_FORMAT:
        raise ParseError(f"not an {INSTANCE_FORMAT} document")
    if doc.get("version") != INSTANCE_VERSION:
        raise ParseError(f"unsupported instance version {doc.get('version')!r}")
    try:
        rows = [LinearConstraint(tuple(r["coeffs"]), r["comparator"], r["rhs"])
                for r in doc.get("immutable", [])]
        p = PresentProblem(tuple(doc["c"]), tuple(doc["a"]), doc["b"], tuple(rows))
        if doc.get("n", p.n) != p.n:
            raise ValueError(f"n = {doc['n']} but {p.n} coefficients given")
        favored = favored_from_dict(doc["favored"]) if "favored" in doc else None
        mutable = mutable_from_dict(doc["mutable"]) if "mutable" in doc else None
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"bad instance: {err}") from None
    return p, favored, mutable, doc.get("meta", {})


def read_problem(text: str, fmt: str = "profit-weight"):
    """Read either a native instance or a kplib file (detected by the first character)."""
    if text.lstrip().startswith("{"):
        return load_instance(text)
    return to_cover(parse_kplib(text, fmt)), None, None, {}
