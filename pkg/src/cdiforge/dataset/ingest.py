"""Bring a measured diffraction magnitude onto the network grid."""

import logging

import numpy as np

from cdiforge.errors import VolumeError
from cdiforge.volume import RealVolume, dct_resample, ensure_finite

logger = logging.getLogger(__name__)


def pad_even(vol: np.ndarray) -> np.ndarray:
    """Append one zero slice along every odd axis."""
    pad = [(0, n % 2) for n in vol.shape]
    if not any(after for _, after in pad):
        return vol
    return np.pad(vol, pad)


def centroid_crop(vol: np.ndarray) -> np.ndarray:
    """Cubic crop of side ``min(dims)`` centred on the intensity centroid.

    The start index is clipped so the cube stays inside the volume.
    """
    side = min(vol.shape)
    weights = vol.astype(np.float64)
    total = weights.sum()
    starts = []
    for axis, n in enumerate(vol.shape):
        other = tuple(a for a in range(vol.ndim) if a != axis)
        profile = weights.sum(axis=other)
        centre = float(np.dot(np.arange(n) + 0.5, profile) / total)
        start = int(round(centre - side / 2))
        starts.append(min(max(start, 0), n - side))
    return vol[tuple(slice(s, s + side) for s in starts)]


def ingest_experimental(vol: RealVolume, target_dims: tuple[int, int, int]) -> RealVolume:
    """Pad, crop, resample, clamp and max-normalize a magnitude volume.

    Args:
        vol: Non-negative 3D magnitude of any dims, e.g. a 151 x 133 x 103 stack.
        target_dims: Network input dims; each must not exceed the cropped cube side.

    Returns:
        float32 volume of ``target_dims`` with min >= 0 and max == 1.

    Raises:
        VolumeError: if the input is not 3D, is non-finite or all zero, or the
            target is larger than the crop.
    """
    if vol.ndim != 3:
        raise VolumeError(f"ingest_experimental expects a 3D volume, got shape {vol.shape}")
    ensure_finite(vol, "experimental volume")
    data = np.clip(np.asarray(vol, dtype=np.float64), 0.0, None)
    if not data.any():
        raise VolumeError("ingest_experimental: input volume is all zero")

    cube = centroid_crop(pad_even(data))
    side = cube.shape[0]
    if any(t > side for t in target_dims):
        raise VolumeError(f"target {tuple(target_dims)} exceeds the {side}^3 crop of {vol.shape}")
    logger.debug("cropped %s to %d^3 about the intensity centroid", vol.shape, side)

    resampled = np.clip(dct_resample(cube, target_dims), 0.0, None)
    peak = resampled.max()
    if peak <= 0:
        raise VolumeError("ingest_experimental: resampled volume is all zero")
    return (resampled / peak).astype(np.float32)
