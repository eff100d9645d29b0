"""Centred 3D Fourier transforms.

The zero-frequency component sits at voxel ``(nx/2, ny/2, nz/2)``, the way
detectors store diffraction data. The forward transform is unnormalized;
the inverse carries the full ``1/N``.
"""

import numpy as np
from scipy import fft

from cdiforge.volume.field import (
    ComplexVolume,
    RealVolume,
    complex_dtype,
    real_dtype,
    require_even,
)


def center_shift(vol: np.ndarray, forward: bool = True) -> np.ndarray:
    """Cyclic shift by n/2 along every axis.

    For even dims the forward and inverse shifts coincide; the flag only
    documents intent at call sites.
    """
    require_even(vol.shape, "center_shift")
    return fft.fftshift(vol) if forward else fft.ifftshift(vol)


def fft3_centered(obj: ComplexVolume) -> ComplexVolume:
    """Unnormalized DFT with the origin at the centre voxel in both spaces."""
    require_even(obj.shape, "fft3_centered")
    work = np.asarray(obj, dtype=np.complex128)
    spectrum = fft.fftshift(fft.fftn(fft.ifftshift(work)))
    return spectrum.astype(complex_dtype(obj))


def ifft3_centered(spectrum: ComplexVolume) -> ComplexVolume:
    """Exact inverse of :func:`fft3_centered`, including the 1/N factor."""
    require_even(spectrum.shape, "ifft3_centered")
    work = np.asarray(spectrum, dtype=np.complex128)
    obj = fft.fftshift(fft.ifftn(fft.ifftshift(work)))
    return obj.astype(complex_dtype(spectrum))


def magnitude(spectrum: ComplexVolume) -> RealVolume:
    """Voxel-wise modulus."""
    return np.abs(np.asarray(spectrum, dtype=np.complex128)).astype(real_dtype(spectrum))
