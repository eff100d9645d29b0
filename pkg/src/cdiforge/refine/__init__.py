"""Adjoint-gradient refinement of complex-object estimates."""

from cdiforge.refine.objective import Evaluation, evaluate, loss_gradient, magnitude_mae
from cdiforge.refine.optimizer import Adam
from cdiforge.refine.solver import RefineResult, refine, step_factor

__all__ = [
    "Adam",
    "Evaluation",
    "RefineResult",
    "evaluate",
    "loss_gradient",
    "magnitude_mae",
    "refine",
    "step_factor",
]
