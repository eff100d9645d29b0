"""Displacement-field surrogate and the Bragg-projected phase.

The relaxed atomistic displacement is replaced by an affine strain about the
crystal centroid plus a smooth random field, both in lattice units.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from cdiforge.models import BraggVector, CrystalSpec, GridSpec
from cdiforge.volume import RealVolume, wrap_phase

# Stream key that separates displacement draws from geometry draws of the same seed.
DISPLACEMENT_STREAM = 0x5D15


@dataclass(frozen=True)
class DisplacementField:
    """Per-voxel displacement components, lattice units."""

    ux: RealVolume
    uy: RealVolume
    uz: RealVolume

    def components(self) -> tuple[RealVolume, RealVolume, RealVolume]:
        return self.ux, self.uy, self.uz


def displacement_rng(spec: CrystalSpec) -> np.random.Generator:
    return np.random.default_rng((spec.seed, DISPLACEMENT_STREAM))


def voxel_centres(grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Broadcastable voxel-centre coordinates along x, y, z in lattice units."""
    nx, ny, nz = grid.dims
    p = grid.voxel_pitch
    x = (np.arange(nx) + 0.5) * p
    y = (np.arange(ny) + 0.5) * p
    z = (np.arange(nz) + 0.5) * p
    return x[:, None, None], y[None, :, None], z[None, None, :]


def synth_displacement(
    spec: CrystalSpec,
    occupancy: RealVolume,
    grid: GridSpec,
    rng: np.random.Generator,
) -> DisplacementField:
    """u(r) = eps (r - r_c) + A s(r), zero outside the crystal.

    ``s`` is per-component white noise blurred with a Gaussian of
    ``random_field_smoothness`` voxels and scaled to unit max-abs.
    """
    dims = grid.dims
    if not spec.include_strain:
        zero = np.zeros(dims, dtype=np.float32)
        return DisplacementField(zero, zero.copy(), zero.copy())

    occ = occupancy.astype(np.float64)
    coords = voxel_centres(grid)
    total = occ.sum()
    centroid = [float((occ * c).sum() / total) for c in coords]
    offsets = [c - rc for c, rc in zip(coords, centroid, strict=True)]

    eps = np.asarray(spec.affine_strain, dtype=np.float64)
    inside = occ > 0
    fields = []
    for i in range(3):
        u = sum(eps[i, j] * offsets[j] for j in range(3)) * np.ones(dims)
        noise = rng.standard_normal(dims)
        if spec.random_field_smoothness > 0:
            noise = gaussian_filter(noise, spec.random_field_smoothness, mode="wrap")
        peak = np.abs(noise).max()
        if peak > 0:
            u = u + spec.random_field_amplitude * noise / peak
        fields.append(np.where(inside, u, 0.0).astype(np.float32))
    return DisplacementField(*fields)


def phase_from_displacement(u: DisplacementField, g: BraggVector | None = None) -> RealVolume:
    """phi = wrap(g . u), float32 in [-pi, pi)."""
    g = g or BraggVector()
    projected = sum(gi * ui.astype(np.float64) for gi, ui in zip(g.g, u.components(), strict=True))
    return wrap_phase(projected, np.float32)
