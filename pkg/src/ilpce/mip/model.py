"""Bounded-integer linear models and the exact linearization helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational
from typing import Mapping, Sequence, Union

Number = Union[int, Fraction]
Coeffs = Union[Mapping[int, Number], Sequence[Number]]

COMPARATORS = ("<=", ">=", "==")


class ModelError(ValueError):
    """Raised for malformed models: bad bounds, dimension mismatch, bad data."""


class BudgetExceeded(RuntimeError):
    """Raised when a node or time budget runs out before optimality is proven."""


def _exact(value, what):
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, Integral):
        return int(value)
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise ModelError(f"{what} must be an integer or a rational, got {value!r}")


@dataclass(frozen=True)
class Variable:
    name: str
    lower: int
    upper: int

    @property
    def is_binary(self) -> bool:
        return self.lower == 0 and self.upper == 1


@dataclass(frozen=True)
class Constraint:
    coeffs: dict  # var index -> int | Fraction, zeros dropped
    comparator: str
    rhs: Number
    name: str = ""

    def dense(self, num_vars: int) -> list:
        row = [0] * num_vars
        for j, v in self.coeffs.items():
            row[j] = v
        return row


@dataclass
class MipModel:
    """A minimization or maximization over bounded integer variables.

    Constraints are stored sparsely; a dense coefficient list must have one
    entry per variable known at the time it is added.
    """

    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    sense: str = "min"

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def add_var(self, name: str, lower, upper) -> int:
        if lower is None or upper is None:
            raise ModelError(f"variable {name!r} needs finite bounds")
        if isinstance(lower, float) and not lower.is_integer() or (
            isinstance(upper, float) and not upper.is_integer()
        ):
            raise ModelError(f"variable {name!r} bounds must be integers")
        try:
            lo, hi = int(lower), int(upper)
        except (OverflowError, ValueError) as exc:
            raise ModelError(f"variable {name!r} needs finite bounds") from exc
        if lo > hi:
            raise ModelError(f"variable {name!r} has lower bound {lo} > upper bound {hi}")
        self.variables.append(Variable(name, lo, hi))
        return len(self.variables) - 1

    def add_binary(self, name: str) -> int:
        return self.add_var(name, 0, 1)

    def _coeff_map(self, coeffs: Coeffs) -> dict:
        n = self.num_vars
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            coeffs = list(coeffs)
            if len(coeffs) != n:
                raise ModelError(
                    f"coefficient vector has {len(coeffs)} entries for {n} variables"
                )
            items = enumerate(coeffs)
        out = {}
        for j, v in items:
            if not isinstance(j, Integral) or not 0 <= j < n:
                raise ModelError(f"unknown variable index {j!r}")
            v = _exact(v, "coefficient")
            if v:
                out[int(j)] = out.get(int(j), 0) + v
        return {j: v for j, v in out.items() if v}

    def add_constraint(self, coeffs: Coeffs, comparator: str, rhs, name: str = "") -> int:
        if comparator not in COMPARATORS:
            raise ModelError(f"comparator must be one of {COMPARATORS}, got {comparator!r}")
        self.constraints.append(
            Constraint(self._coeff_map(coeffs), comparator, _exact(rhs, "rhs"), name)
        )
        return len(self.constraints) - 1

    def set_objective(self, coeffs: Coeffs, sense: str = "min") -> None:
        if sense not in ("min", "max"):
            raise ModelError(f"sense must be 'min' or 'max', got {sense!r}")
        self.objective = self._coeff_map(coeffs)
        self.sense = sense

    def copy(self) -> "MipModel":
        return MipModel(list(self.variables), list(self.constraints), dict(self.objective), self.sense)

    def evaluate(self, assignment: Sequence[int]) -> Number:
        return sum((v * assignment[j] for j, v in self.objective.items()), 0)

    def is_feasible(self, assignment: Sequence[int]) -> bool:
        if len(assignment) != self.num_vars:
            return False
        for var, val in zip(self.variables, assignment):
            if not var.lower <= val <= var.upper:
                return False
        for con in self.constraints:
            lhs = sum((v * assignment[j] for j, v in con.coeffs.items()), 0)
            if con.comparator == "<=" and lhs > con.rhs:
                return False
            if con.comparator == ">=" and lhs < con.rhs:
                return False
            if con.comparator == "==" and lhs != con.rhs:
                return False
        return True


def add_product(model: MipModel, a_var: int, x_var: int, name: str = "") -> int:
    """Add ``w = a * x`` for a bounded integer ``a`` and a binary (possibly fixed) ``x``.

    The four envelope rows are exact for integral (a, x).
    """
    a = model.variables[a_var]
    x = model.variables[x_var]
    if not 0 <= x.lower <= x.upper <= 1:
        raise ModelError(f"variable {x.name!r} is not binary")
    lo, hi = a.lower, a.upper
    w = model.add_var(name or f"{a.name}*{x.name}", min(lo, 0), max(hi, 0))
    model.add_constraint({w: 1, x_var: -hi}, "<=", 0)
    model.add_constraint({w: 1, x_var: -lo}, ">=", 0)
    # w <= a - lo (1 - x)  and  w >= a - hi (1 - x)
    model.add_constraint({w: 1, a_var: -1, x_var: -lo}, "<=", -lo)
    model.add_constraint({w: 1, a_var: -1, x_var: -hi}, ">=", -hi)
    return w


def l1_objective(model: MipModel, vars: Sequence[int], centers: Sequence[int],
                 weights: Sequence[Number] | None = None) -> dict:
    """Return objective coefficients measuring sum_i weight_i |var_i - center_i|.

    Split variables are added per entry; at a minimum each pair carries the
    absolute deviation. Entries whose variable is fixed at its center are skipped.
    """
    vars = list(vars)
    centers = list(centers)
    weights = [1] * len(vars) if weights is None else list(weights)
    if not len(vars) == len(centers) == len(weights):
        raise ModelError("vars, centers and weights must have equal length")
    expr: dict = {}
    for j, center, weight in zip(vars, centers, weights):
        weight = _exact(weight, "weight")
        if weight < 0:
            raise ModelError(f"negative weight {weight} for variable {j}")
        var = model.variables[j]
        if var.lower == var.upper == center:
            continue
        up = model.add_var(f"{var.name}+", 0, max(var.upper - center, 0))
        down = model.add_var(f"{var.name}-", 0, max(center - var.lower, 0))
        model.add_constraint({j: 1, up: -1, down: 1}, "==", center)
        if weight:
            expr[up] = expr.get(up, 0) + weight
            expr[down] = expr.get(down, 0) + weight
    return expr
