"""DCT-domain resampling.

The volume is taken to the DCT-II domain, the low-frequency corner of the
target size is kept, and an inverse (DCT-III) at the target size brings it
back. Each axis is rescaled by sqrt(n_out / n_in), so constants survive.
Sample positions are cell centred: sample x sits at (x + 1/2) / n of the
unit interval in both grids.
"""

import math

import numpy as np
from scipy import fft

from cdiforge.errors import VolumeError
from cdiforge.volume.field import RealVolume, real_dtype, require_even


def dct_resample(vol: RealVolume, target_dims: tuple[int, int, int]) -> RealVolume:
    """Resize a real volume to ``target_dims`` by DCT cropping.

    Args:
        vol: Source volume with even dims.
        target_dims: Even dims no larger than the source along any axis.

    Returns:
        Resampled volume in the input's precision.
    """
    target = tuple(int(n) for n in target_dims)
    require_even(vol.shape, "dct_resample")
    require_even(target, "dct_resample")
    if len(target) != vol.ndim or any(t > n for t, n in zip(target, vol.shape, strict=True)):
        raise VolumeError(f"dct_resample: target {target} exceeds source {vol.shape}")
    if target == vol.shape:
        return vol.astype(real_dtype(vol), copy=True)

    coeffs = fft.dctn(np.asarray(vol, dtype=np.float64), type=2, norm="ortho")
    cropped = coeffs[tuple(slice(0, t) for t in target)]
    out = fft.idctn(cropped, type=2, norm="ortho")
    scale = math.prod(math.sqrt(t / n) for t, n in zip(target, vol.shape, strict=True))
    return (out * scale).astype(real_dtype(vol))
