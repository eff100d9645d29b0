"""Volume types, precision policy, and element-wise field algebra.

Volumes are plain ``numpy`` arrays of shape ``(nx, ny, nz)`` in C order, so
the flat index is ``(x * ny + y) * nz + z``. Storage precision is 32-bit;
all arithmetic runs in 64-bit and is cast back on return. Passing 64-bit
inputs keeps the result in 64-bit, which is how gradient checks run.
"""

import math
from typing import Any

import numpy as np
import numpy.typing as npt

from cdiforge.errors import VolumeError

RealVolume = npt.NDArray[np.floating[Any]]
ComplexVolume = npt.NDArray[np.complexfloating[Any, Any]]
Support = npt.NDArray[np.bool_]

Dims = tuple[int, ...]

# Largest float32 values strictly inside [-pi, pi); float32(pi) itself exceeds pi.
_PHASE_HIGH_32 = np.nextafter(np.float32(math.pi), np.float32(0.0))
_PHASE_LOW_32 = np.nextafter(np.float32(-math.pi), np.float32(0.0))


def is_double(*arrays: npt.NDArray[Any]) -> bool:
    """True when any input carries 64-bit precision."""
    return any(a.dtype in (np.float64, np.complex128) for a in arrays)


def real_dtype(*arrays: npt.NDArray[Any]) -> type[np.floating[Any]]:
    return np.float64 if is_double(*arrays) else np.float32


def complex_dtype(*arrays: npt.NDArray[Any]) -> type[np.complexfloating[Any, Any]]:
    return np.complex128 if is_double(*arrays) else np.complex64


def require_even(dims: Dims, operation: str) -> None:
    """Reject odd or degenerate dims; the centred convention needs an exact centre voxel."""
    if any(n < 2 or n % 2 for n in dims):
        raise VolumeError(f"{operation} needs even dims >= 2, got {tuple(dims)}")


def require_same_dims(a: npt.NDArray[Any], b: npt.NDArray[Any], operation: str) -> None:
    if a.shape != b.shape:
        raise VolumeError(f"{operation}: dimension mismatch {a.shape} vs {b.shape}")


def ensure_finite(vol: npt.NDArray[Any], what: str) -> None:
    """Raise if the volume holds NaN or Inf."""
    if not np.all(np.isfinite(vol)):
        raise VolumeError(f"{what} contains non-finite values")


def wrap_phase(phase: npt.ArrayLike, dtype: type[np.floating[Any]] = np.float64) -> RealVolume:
    """Wrap radians into [-pi, pi).

    In 32-bit output the bounds are pulled one ulp inside, since float32(pi)
    is larger than pi.
    """
    wrapped = np.mod(np.asarray(phase, dtype=np.float64) + math.pi, 2.0 * math.pi) - math.pi
    if dtype == np.float32:
        return np.clip(wrapped.astype(np.float32), _PHASE_LOW_32, _PHASE_HIGH_32)
    return wrapped


def recombine(shape: RealVolume, phase: RealVolume) -> ComplexVolume:
    """Combine an amplitude and a phase (radians) into ``shape * exp(i * phase)``."""
    require_same_dims(shape, phase, "recombine")
    amplitude = shape.astype(np.float64)
    angle = phase.astype(np.float64)
    obj = amplitude * (np.cos(angle) + 1j * np.sin(angle))
    return obj.astype(complex_dtype(shape, phase))
