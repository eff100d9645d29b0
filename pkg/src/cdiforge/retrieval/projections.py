"""Fourier-modulus and support projections for iterative phasing."""

import numpy as np
from scipy.ndimage import gaussian_filter

from cdiforge.errors import ConvergenceError, VolumeError
from cdiforge.volume import (
    ComplexVolume,
    RealVolume,
    Support,
    complex_dtype,
    fft3_centered,
    ifft3_centered,
    require_same_dims,
)

DEFAULT_EPSILON = 1e-12


def project_spectrum(
    spectrum: np.ndarray, m: np.ndarray, epsilon: float, modulus: np.ndarray | None = None
) -> np.ndarray:
    """Impose ``m`` on an already transformed iterate and return to real space."""
    if modulus is None:
        modulus = np.abs(spectrum)
    return ifft3_centered(spectrum * (m / (modulus + epsilon)))


def _project(rho: np.ndarray, m: np.ndarray, epsilon: float) -> np.ndarray:
    """Complex128 core of the modulus projection."""
    return project_spectrum(fft3_centered(rho), m, epsilon)


def modulus_project(
    rho: ComplexVolume, m: RealVolume, epsilon: float = DEFAULT_EPSILON
) -> ComplexVolume:
    """Replace the Fourier modulus of ``rho`` by ``m`` and transform back."""
    require_same_dims(rho, m, "modulus_project")
    work = np.asarray(rho, dtype=np.complex128)
    out = _project(work, np.asarray(m, dtype=np.float64), epsilon)
    return out.astype(complex_dtype(rho, m))


def hio_combine(
    rho: ComplexVolume, projected: ComplexVolume, support: Support, beta: float
) -> ComplexVolume:
    """Hybrid input-output update: projected inside, rho - beta * projected outside."""
    return np.where(support, projected, rho - beta * projected)


def er_combine(projected: ComplexVolume, support: Support) -> ComplexVolume:
    """Error-reduction update: projected inside the support, zero outside."""
    return np.where(support, projected, 0)


def er_step(
    rho: ComplexVolume, m: RealVolume, support: Support, epsilon: float = DEFAULT_EPSILON
) -> ComplexVolume:
    """Error reduction: modulus projection kept inside the support, zero outside."""
    require_same_dims(rho, support, "er_step")
    projected = modulus_project(rho, m, epsilon)
    return er_combine(projected, support).astype(projected.dtype)


def hio_step(
    rho: ComplexVolume,
    m: RealVolume,
    support: Support,
    beta: float,
    epsilon: float = DEFAULT_EPSILON,
) -> ComplexVolume:
    require_same_dims(rho, support, "hio_step")
    projected = modulus_project(rho, m, epsilon)
    out = hio_combine(np.asarray(rho, dtype=np.complex128), projected, support, beta)
    return out.astype(projected.dtype)


def blur_modulus(rho: ComplexVolume, sigma: float) -> np.ndarray:
    """Periodic Gaussian blur of |rho| (the grid is a DFT cell, so it wraps)."""
    amplitude = np.abs(np.asarray(rho, dtype=np.complex128))
    if sigma <= 0:
        return amplitude
    return gaussian_filter(amplitude, sigma, mode="wrap")


def shrinkwrap(rho: ComplexVolume, sigma: float, threshold: float, iteration: int = 0) -> Support:
    """Support = {blur(|rho|) >= threshold * max}; the brightest voxel is always kept.

    Raises:
        ConvergenceError: if the object vanished, so no support can be formed.
    """
    blurred = blur_modulus(rho, sigma)
    peak = blurred.max()
    if not np.isfinite(peak) or peak <= 0:
        raise ConvergenceError("shrink-wrap produced an empty support", iteration)
    support = blurred >= threshold * peak
    support[np.unravel_index(np.argmax(blurred), blurred.shape)] = True
    return support


def autocorrelation_support(m: RealVolume, threshold: float) -> Support:
    """Initial support from the thresholded autocorrelation |IFFT(m^2)|."""
    intensity = np.asarray(m, dtype=np.float64) ** 2
    autocorr = np.abs(ifft3_centered(intensity.astype(np.complex128)))
    peak = autocorr.max()
    if peak <= 0:
        raise ConvergenceError("diffraction data is identically zero", 0)
    return autocorr >= threshold * peak


def fourier_error(rho: ComplexVolume, m: RealVolume, normalize: bool = False) -> float:
    """chi^2 = sum (|F(rho)| - m)^2 / sum m^2.

    With ``normalize`` the modulus is divided by its maximum first, matching
    max-normalized data.
    """
    require_same_dims(rho, m, "fourier_error")
    modulus = np.abs(fft3_centered(np.asarray(rho, dtype=np.complex128)))
    if normalize and modulus.max() > 0:
        modulus /= modulus.max()
    target = np.asarray(m, dtype=np.float64)
    denom = float(np.sum(target**2))
    if denom <= 0:
        raise VolumeError("fourier_error: data is identically zero")
    return float(np.sum((modulus - target) ** 2) / denom)


def support_volume(support: Support) -> RealVolume:
    """Support as a real 0/1 volume for storage."""
    return support.astype(np.float32)
