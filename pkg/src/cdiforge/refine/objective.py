"""Smoothed magnitude-MAE objective and its adjoint gradient.

L(rho) = mean_v s(|F(rho)|_v / c - m_v), s(x) = sqrt(x^2 + eps^2), where F is
the centred FFT and c = max |F| when normalizing (1 otherwise).

The gradient is returned as dL/dRe(rho) + i dL/dIm(rho). For the unnormalized
DFT this is ``ifft3_centered(w * F / |F|)`` with w = s'(r) / c, since
the 1/N of the mean cancels the N of the adjoint transform. With the
brightest voxel held fixed, c is a function of that one voxel and adds
-sum(s'(r) |F|) / c^2 to its weight. F / |F| is taken as 0 where
|F| = 0.
"""

from dataclasses import dataclass

import numpy as np

from cdiforge.volume import (
    ComplexVolume,
    RealVolume,
    complex_dtype,
    fft3_centered,
    ifft3_centered,
    require_same_dims,
)

DEFAULT_SMOOTHING = 1e-8


@dataclass(frozen=True)
class Evaluation:
    """Loss value, gradient (complex128) and the spectrum they came from."""

    loss: float
    gradient: np.ndarray
    spectrum: np.ndarray


def _residual(
    rho: np.ndarray, m: np.ndarray, normalize: bool
) -> tuple[np.ndarray, np.ndarray, float, np.ndarray]:
    spectrum = fft3_centered(rho)
    modulus = np.abs(spectrum)
    peak = float(modulus.max())
    scale = peak if normalize and peak > 0 else 1.0
    return spectrum, modulus, scale, modulus / scale - m


def evaluate(
    rho: ComplexVolume,
    m: RealVolume,
    smoothing_eps: float = DEFAULT_SMOOTHING,
    normalize: bool = True,
    freeze_normalization: bool = False,
) -> Evaluation:
    """Loss and gradient in one pass, computed in 64-bit."""
    require_same_dims(rho, m, "magnitude_mae")
    work = np.asarray(rho, dtype=np.complex128)
    target = np.asarray(m, dtype=np.float64)
    spectrum, modulus, scale, residual = _residual(work, target, normalize)

    smooth = np.sqrt(residual**2 + smoothing_eps**2)
    slope = residual / smooth
    weight = slope / scale
    if normalize and not freeze_normalization and modulus.max() > 0:
        brightest = np.unravel_index(np.argmax(modulus), modulus.shape)
        weight[brightest] -= float(np.sum(slope * modulus)) / scale**2

    phase = np.divide(spectrum, modulus, out=np.zeros_like(spectrum), where=modulus > 0)
    gradient = ifft3_centered(weight * phase)
    return Evaluation(loss=float(smooth.mean()), gradient=gradient, spectrum=spectrum)


def magnitude_mae(
    rho: ComplexVolume,
    m: RealVolume,
    smoothing_eps: float = DEFAULT_SMOOTHING,
    normalize: bool = True,
) -> float:
    """Smoothed mean absolute error between |F(rho)| and m."""
    require_same_dims(rho, m, "magnitude_mae")
    _, _, _, residual = _residual(
        np.asarray(rho, dtype=np.complex128), np.asarray(m, dtype=np.float64), normalize
    )
    return float(np.sqrt(residual**2 + smoothing_eps**2).mean())


def loss_gradient(
    rho: ComplexVolume,
    m: RealVolume,
    smoothing_eps: float = DEFAULT_SMOOTHING,
    normalize: bool = True,
    freeze_normalization: bool = False,
) -> ComplexVolume:
    """dL/dRe(rho) + i dL/dIm(rho), in the precision of the inputs."""
    result = evaluate(rho, m, smoothing_eps, normalize, freeze_normalization)
    return result.gradient.astype(complex_dtype(rho, m))
