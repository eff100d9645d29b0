"""Volumetric numerics shared by every solver."""

from cdiforge.volume.field import (
    ComplexVolume,
    RealVolume,
    Support,
    complex_dtype,
    ensure_finite,
    is_double,
    real_dtype,
    recombine,
    require_even,
    require_same_dims,
    wrap_phase,
)
from cdiforge.volume.fourier import center_shift, fft3_centered, ifft3_centered, magnitude
from cdiforge.volume.resample import dct_resample

__all__ = [
    "ComplexVolume",
    "RealVolume",
    "Support",
    "center_shift",
    "complex_dtype",
    "dct_resample",
    "ensure_finite",
    "fft3_centered",
    "ifft3_centered",
    "is_double",
    "magnitude",
    "real_dtype",
    "recombine",
    "require_even",
    "require_same_dims",
    "wrap_phase",
]
