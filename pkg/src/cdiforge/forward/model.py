"""Bragg-CDI forward model: complex object to centred diffraction magnitude."""

import numpy as np

from cdiforge.errors import VolumeError
from cdiforge.models import ForwardConfig
from cdiforge.volume import (
    RealVolume,
    fft3_centered,
    magnitude,
    real_dtype,
    recombine,
    require_even,
)

SUPPORT_LEVEL = 0.1


def simulate_diffraction(
    shape: RealVolume,
    phase: RealVolume,
    config: ForwardConfig | None = None,
) -> RealVolume:
    """|FFT(shape * exp(i phase))|, divided by its maximum when normalizing.

    Raises:
        VolumeError: if dims differ or are odd, or the shape is identically zero.
    """
    config = config or ForwardConfig()
    require_even(shape.shape, "simulate_diffraction")
    if not np.any(shape):
        raise VolumeError("simulate_diffraction: shape is identically zero")

    obj = recombine(shape.astype(np.float64), phase.astype(np.float64))
    m = magnitude(fft3_centered(obj))
    if config.normalize:
        m /= m.max()
    return m.astype(real_dtype(shape, phase))


def oversampling_ratio(shape: RealVolume) -> tuple[float, float, float]:
    """Per-axis grid extent over support bounding-box extent (support = shape >= 0.1)."""
    support = np.asarray(shape) >= SUPPORT_LEVEL
    if not support.any():
        raise VolumeError("oversampling_ratio: support is empty")
    ratios = []
    for axis, n in enumerate(support.shape):
        filled = np.nonzero(support.any(axis=tuple(a for a in range(support.ndim) if a != axis)))[0]
        ratios.append(n / float(filled[-1] - filled[0] + 1))
    return (ratios[0], ratios[1], ratios[2])
