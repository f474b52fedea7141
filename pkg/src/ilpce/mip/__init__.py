"""Self-contained exact solver for bounded-integer linear models."""

from .bnb import MipSolution, solve
from .model import (
    BudgetExceeded,
    Constraint,
    MipModel,
    ModelError,
    Variable,
    add_product,
    l1_objective,
)

__all__ = [
    "BudgetExceeded",
    "Constraint",
    "MipModel",
    "MipSolution",
    "ModelError",
    "Variable",
    "add_product",
    "l1_objective",
    "solve",
]
