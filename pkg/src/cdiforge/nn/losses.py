"""Supervised MAE plus the physics-aware diffraction term.

total = MAE(shape) + MAE(phase) + lambda * magnitude_mae(shape * exp(i phase), m)

The physics gradient comes from the refinement objective. With
g = dL/dRe(rho) + i dL/dIm(rho) and rho = s exp(i phi):
dL/ds = Re(g exp(-i phi)) and dL/dphi = s Im(g exp(-i phi)).
"""

from collections.abc import Collection
from dataclasses import dataclass
from typing import Literal

import numpy as np

from cdiforge.refine.objective import DEFAULT_SMOOTHING, evaluate
from cdiforge.volume import recombine

Term = Literal["shape", "phase", "physics"]
ALL_TERMS: frozenset[Term] = frozenset({"shape", "phase", "physics"})


@dataclass(frozen=True)
class LossTerms:
    shape: float
    phase: float
    physics: float
    total: float


def _batched(*arrays: np.ndarray) -> list[np.ndarray]:
    return [a[None] if a.ndim == 3 else a for a in arrays]


def physics_loss(
    shape_pred: np.ndarray,
    phase_pred: np.ndarray,
    shape_true: np.ndarray,
    phase_true: np.ndarray,
    m: np.ndarray,
    physics_weight: float = 1.0,
    smoothing_eps: float = DEFAULT_SMOOTHING,
    terms: Collection[Term] = ALL_TERMS,
) -> tuple[LossTerms, np.ndarray, np.ndarray]:
    """Loss over a batch (or one volume) and its gradients w.r.t. both predictions.

    Every term is averaged over the batch. ``terms`` selects which ones enter
    the total and the gradients; all three are always reported.

    Returns:
        (terms, d total / d shape_pred, d total / d phase_pred), gradients
        shaped like the predictions.
    """
    single = shape_pred.ndim == 3
    sp, pp, st, pt, mm = _batched(shape_pred, phase_pred, shape_true, phase_true, m)
    dtype = np.result_type(sp, pp)
    count = sp.size
    batch = sp.shape[0]

    shape_diff = sp.astype(np.float64) - st
    phase_diff = pp.astype(np.float64) - pt
    shape_mae = float(np.abs(shape_diff).mean())
    phase_mae = float(np.abs(phase_diff).mean())

    grad_shape = np.zeros(sp.shape, dtype=np.float64)
    grad_phase = np.zeros(pp.shape, dtype=np.float64)
    if "shape" in terms:
        grad_shape += np.sign(shape_diff) / count
    if "phase" in terms:
        grad_phase += np.sign(phase_diff) / count

    physics = 0.0
    for b in range(batch):
        s = sp[b].astype(np.float64)
        phi = pp[b].astype(np.float64)
        result = evaluate(recombine(s, phi), mm[b], smoothing_eps, normalize=True)
        physics += result.loss / batch
        if "physics" in terms and physics_weight > 0:
            rotated = result.gradient * np.exp(-1j * phi) * (physics_weight / batch)
            grad_shape[b] += rotated.real
            grad_phase[b] += s * rotated.imag

    total = (
        (shape_mae if "shape" in terms else 0.0)
        + (phase_mae if "phase" in terms else 0.0)
        + (physics_weight * physics if "physics" in terms else 0.0)
    )
    losses = LossTerms(shape=shape_mae, phase=phase_mae, physics=physics, total=total)
    grad_shape = grad_shape.astype(dtype)
    grad_phase = grad_phase.astype(dtype)
    if single:
        return losses, grad_shape[0], grad_phase[0]
    return losses, grad_shape, grad_phase
