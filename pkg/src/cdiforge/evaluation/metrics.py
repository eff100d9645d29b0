"""Reconstruction errors that ignore what the diffraction magnitude cannot see.

The magnitude is blind to three things: the conjugate twin, a global phase
offset, and an integer cyclic shift. ``recon_error`` factors all three out
before comparing a prediction to the ground truth.
"""

import math

import numpy as np
from scipy import fft

from cdiforge.errors import VolumeError
from cdiforge.models import BraggVector, ReconError
from cdiforge.volume import (
    ComplexVolume,
    RealVolume,
    Support,
    complex_dtype,
    real_dtype,
    require_even,
    require_same_dims,
    wrap_phase,
)

Shift = tuple[int, int, int]

# Correlation peaks this close to the maximum count as ties.
_TIE_TOLERANCE = 1e-9


def reflect(vol: np.ndarray) -> np.ndarray:
    """out[i, j, k] = vol[-i mod nx, -j mod ny, -k mod nz]."""
    return np.roll(np.flip(vol), 1, axis=tuple(range(vol.ndim)))


def conjugate_twin(rho: ComplexVolume) -> ComplexVolume:
    """Conjugate of the point-reflected object; it has the same diffraction magnitude."""
    require_even(rho.shape, "conjugate_twin")
    return np.conj(reflect(rho)).astype(complex_dtype(rho))


def twin_parts(shape: RealVolume, phase: RealVolume) -> tuple[RealVolume, RealVolume]:
    """Shape and phase of the conjugate twin of ``shape * exp(i phase)``."""
    return reflect(shape), wrap_phase(-reflect(phase), real_dtype(phase))


def _signed(index: tuple[int, ...], dims: tuple[int, ...]) -> Shift:
    s = tuple(i - n if i >= n // 2 else i for i, n in zip(index, dims, strict=True))
    return (int(s[0]), int(s[1]), int(s[2]))


def register(pred: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, Shift]:
    """Cyclically shift ``pred`` onto ``target``.

    The shift maximizes the cross-correlation of |pred| with |target|,
    computed through the FFT. Each component lies in [-n/2, n/2). Ties go to
    the smallest total shift, then to the lexicographically smallest.

    Returns:
        (shifted pred, shift) with ``np.roll(pred, shift, axis=(0, 1, 2))`` the first.
    """
    require_same_dims(pred, target, "register")
    a = np.abs(np.asarray(target, dtype=np.complex128))
    b = np.abs(np.asarray(pred, dtype=np.complex128))
    correlation = fft.ifftn(fft.fftn(a) * np.conj(fft.fftn(b))).real

    peak = correlation.max()
    tied = np.argwhere(correlation >= peak - _TIE_TOLERANCE * max(abs(peak), 1e-300))
    candidates = [_signed(tuple(index), pred.shape) for index in tied]
    shift = min(candidates, key=lambda s: (sum(abs(c) for c in s), s))
    return np.roll(pred, shift, axis=(0, 1, 2)), shift


def gauge_fix(phase: RealVolume, weights: RealVolume) -> RealVolume:
    """Remove the weighted circular mean: wrap(phase - arg(sum w exp(i phase))).

    Raises:
        VolumeError: if the weights are all zero or negative somewhere.
    """
    require_same_dims(phase, weights, "gauge_fix")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0):
        raise VolumeError("gauge_fix: weights must be non-negative")
    if not w.any():
        raise VolumeError("gauge_fix: weights are all zero")
    phi = np.asarray(phase, dtype=np.float64)
    offset = np.angle(np.sum(w * np.exp(1j * phi)))
    return wrap_phase(phi - offset, real_dtype(phase))


def phase_difference(pred: RealVolume, true: RealVolume, weights: RealVolume) -> float:
    """Weighted mean of the wrapped absolute phase difference, in [0, pi]."""
    w = np.asarray(weights, dtype=np.float64)
    diff = np.abs(wrap_phase(np.asarray(pred, np.float64) - np.asarray(true, np.float64)))
    return min(float(np.sum(w * diff) / np.sum(w)), math.pi)


def recon_error(
    pred_shape: RealVolume,
    pred_phase: RealVolume,
    true_shape: RealVolume,
    true_phase: RealVolume,
    phase_weight: float = 1.0,
    chi2: float | None = None,
) -> ReconError:
    """Error of a prediction after resolving twin, shift and global phase.

    Both the prediction and its conjugate twin are registered against the
    truth and gauge-fixed with the true shape as weights. The candidate with
    the lower ``shape_mae + phase_weight * phase_mae / pi`` wins; the
    prediction itself wins ties.

    Raises:
        VolumeError: on a dims mismatch or an empty true shape.
    """
    for vol in (pred_phase, true_shape, true_phase):
        require_same_dims(pred_shape, vol, "recon_error")
    weights = np.asarray(true_shape, dtype=np.float64)
    true_fixed = gauge_fix(np.asarray(true_phase, np.float64), weights)

    scored: list[tuple[float, ReconError]] = []
    candidates = (
        (False, (pred_shape, pred_phase)),
        (True, twin_parts(np.asarray(pred_shape), np.asarray(pred_phase))),
    )
    for twin, (shape, phase) in candidates:
        shifted, shift = register(np.asarray(shape, dtype=np.float64), weights)
        phase_aligned = np.roll(np.asarray(phase, np.float64), shift, axis=(0, 1, 2))
        shape_mae = float(np.mean(np.abs(shifted - weights)))
        phase_mae = phase_difference(gauge_fix(phase_aligned, weights), true_fixed, weights)
        score = shape_mae + phase_weight * phase_mae / math.pi
        error = ReconError(
            shape_mae=shape_mae, phase_mae=phase_mae, chi2=chi2, twin_used=twin, shift_used=shift
        )
        scored.append((score, error))
    # min keeps the first of equal scores, i.e. the untwinned prediction
    return min(scored, key=lambda item: item[0])[1]


def split_object(rho: ComplexVolume) -> tuple[RealVolume, RealVolume]:
    """Max-normalized modulus and phase of a complex object."""
    modulus = np.abs(np.asarray(rho, dtype=np.complex128))
    peak = modulus.max()
    if peak <= 0:
        raise VolumeError("split_object: object is identically zero")
    dtype = real_dtype(rho)
    return (modulus / peak).astype(dtype), np.angle(rho).astype(dtype)


def strain_map(
    phase: RealVolume,
    support: Support,
    bragg: BraggVector | None = None,
    pitch: float = 1.0,
) -> RealVolume:
    """Strain projected on the Bragg direction, (g_hat . grad phi) / |g|.

    The gradient uses wrapped neighbour differences, averaging the forward and
    backward ones where both neighbours lie inside the support. Voxels outside
    the support are zero.
    """
    require_same_dims(phase, support, "strain_map")
    g = np.asarray((bragg or BraggVector()).g, dtype=np.float64)
    g_norm = float(np.linalg.norm(g))
    if g_norm == 0:
        raise VolumeError("strain_map: Bragg vector is zero")
    inside = np.asarray(support, dtype=bool)
    phi = np.asarray(phase, dtype=np.float64)

    strain = np.zeros(phi.shape, dtype=np.float64)
    for axis in range(3):
        if g[axis] == 0:
            continue
        forward = wrap_phase(np.roll(phi, -1, axis) - phi)
        backward = wrap_phase(phi - np.roll(phi, 1, axis))
        has_next = inside & np.roll(inside, -1, axis)
        has_prev = inside & np.roll(inside, 1, axis)
        count = has_next.astype(np.float64) + has_prev
        total = np.where(has_next, forward, 0.0) + np.where(has_prev, backward, 0.0)
        derivative = np.divide(total, count, out=np.zeros_like(total), where=count > 0) / pitch
        strain += (g[axis] / g_norm) * derivative
    return np.where(inside, strain / g_norm, 0.0).astype(real_dtype(phase))
