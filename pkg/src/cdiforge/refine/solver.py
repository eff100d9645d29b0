"""Gradient refinement of a complex object against a measured magnitude."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from cdiforge.errors import ConvergenceError
from cdiforge.models import RefineConfig
from cdiforge.refine.objective import evaluate
from cdiforge.refine.optimizer import Adam
from cdiforge.volume import (
    ComplexVolume,
    RealVolume,
    Support,
    complex_dtype,
    ensure_finite,
    require_same_dims,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RefineResult:
    """Best iterate and the loss of every iterate visited."""

    obj: ComplexVolume
    loss_history: np.ndarray
    best_iteration: int

    @property
    def best_loss(self) -> float:
        return float(self.loss_history[self.best_iteration])


def step_factor(k: int, iterations: int, schedule: str) -> float:
    """Multiplier on the base step at iteration k; cosine decays from 1 towards 0."""
    if schedule == "cosine":
        return 0.5 * (1.0 + math.cos(math.pi * k / iterations))
    return 1.0


def refine(
    rho0: ComplexVolume,
    m: RealVolume,
    config: RefineConfig | None = None,
    support: Support | None = None,
) -> RefineResult:
    """Minimize the magnitude MAE with Adam, starting from ``rho0``.

    ``loss_history[k]`` is the loss of the k-th iterate, the start being
    iterate 0. The returned object is the first iterate reaching the lowest
    loss. The step follows ``config.step_schedule``.

    Raises:
        ConvergenceError: if the loss becomes non-finite; usually the step is too large.
    """
    config = config or RefineConfig()
    require_same_dims(rho0, m, "refine")
    ensure_finite(rho0, "initial object")

    rho = np.array(rho0, dtype=np.complex128, order="C")
    if support is not None:
        require_same_dims(support, m, "refine")
        support = np.asarray(support, dtype=bool)
    # real/imag interleaved view; Adam writes through it into rho
    params = rho.view(np.float64)
    optimizer = Adam(
        [params],
        lr=config.step_size,
        beta1=config.adam_beta1,
        beta2=config.adam_beta2,
        eps=config.adam_eps,
    )

    history = np.empty(config.iterations, dtype=np.float64)
    best = rho.copy()
    best_iteration = 0
    for k in range(config.iterations):
        result = evaluate(
            rho,
            m,
            config.smoothing_eps,
            config.normalize,
            config.freeze_normalization,
        )
        if not math.isfinite(result.loss):
            raise ConvergenceError("refinement loss became non-finite", k)
        history[k] = result.loss
        if result.loss < history[best_iteration]:
            best = rho.copy()
            best_iteration = k

        optimizer.lr = config.step_size * step_factor(k, config.iterations, config.step_schedule)
        optimizer.step([np.ascontiguousarray(result.gradient).view(np.float64)])
        if support is not None:
            rho[~support] = 0

    logger.info(
        "refine: loss %.4e -> best %.4e at iteration %d of %d",
        history[0],
        history[best_iteration],
        best_iteration,
        config.iterations,
    )
    return RefineResult(
        obj=best.astype(complex_dtype(rho0, m)),
        loss_history=history,
        best_iteration=best_iteration,
    )
