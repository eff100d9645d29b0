"""Clip-plane polyhedra and fractional-occupancy voxelization.

Coordinates are lattice units. Voxel ``v`` along an axis covers
``[v, v + 1) * pitch`` with its centre at ``(v + 1/2) * pitch``. The crystal
is centred on the centre of voxel ``n/2`` and lives inside a cube of half the
box extent, shrunk by ``box_padding`` on every side.
"""

import hashlib
import logging

import numpy as np

from cdiforge.errors import GenerationError
from cdiforge.models import ClipPlane, CrystalSpec, GeneratorConfig, GridSpec
from cdiforge.models.schemas import STRAIN_LIMIT, Tensor3

logger = logging.getLogger(__name__)

_U64 = (1 << 64) - 1

# {100}, {110} and {111} directions, both signs
_HIGH_SYMMETRY = np.array(
    [v for v in np.ndindex(3, 3, 3) if any(c != 1 for c in v)], dtype=np.float64
) - 1.0
_HIGH_SYMMETRY /= np.linalg.norm(_HIGH_SYMMETRY, axis=1, keepdims=True)


def derive_sample_seed(dataset_seed: int, index: int) -> int:
    """Per-sample seed: SHA-256 of ``dataset_seed XOR index``, first 8 bytes big-endian."""
    mixed = (int(dataset_seed) ^ int(index)) & _U64
    digest = hashlib.sha256(mixed.to_bytes(8, "little")).digest()
    return int.from_bytes(digest[:8], "big")


def sample_unit_normal(rng: np.random.Generator) -> np.ndarray:
    """Direction uniform on the unit sphere (normalized Gaussian triple)."""
    while True:
        v = rng.standard_normal(3)
        norm = float(np.linalg.norm(v))
        if norm > 1e-12:
            return v / norm


def sample_plane_normal(rng: np.random.Generator, policy: str = "uniform") -> np.ndarray:
    if policy == "high_symmetry":
        return _HIGH_SYMMETRY[int(rng.integers(len(_HIGH_SYMMETRY)))].copy()
    return sample_unit_normal(rng)


def crystal_region(grid: GridSpec, box_padding: float) -> tuple[np.ndarray, np.ndarray]:
    """Centre and per-axis half edge of the crystal block, lattice units."""
    dims = np.asarray(grid.dims, dtype=np.float64)
    centre = (dims / 2.0 + 0.5) * grid.voxel_pitch
    half = dims * grid.voxel_pitch / 4.0 - box_padding
    if np.any(half <= 0):
        raise GenerationError(
            f"box_padding {box_padding} leaves no room for a crystal in {grid.dims}"
        )
    return centre, half


def draw_affine_strain(rng: np.random.Generator) -> np.ndarray:
    """Symmetric strain tensor with every engineering component in [-0.01, 0.01].

    Shear entries hold half the engineering shear. The tensor is scaled down
    when its principal strain exceeds the same limit.
    """
    eps = np.diag(rng.uniform(-STRAIN_LIMIT, STRAIN_LIMIT, size=3))
    for i, j in ((0, 1), (0, 2), (1, 2)):
        gamma = rng.uniform(-STRAIN_LIMIT, STRAIN_LIMIT)
        eps[i, j] = eps[j, i] = gamma / 2.0
    principal = float(np.linalg.norm(eps, 2))
    if principal > STRAIN_LIMIT:
        eps *= STRAIN_LIMIT / principal
    return eps


def voxelize_polyhedron(
    normals: np.ndarray,
    distances: np.ndarray,
    grid: GridSpec,
    half_extent: np.ndarray,
    subsamples: int = 4,
) -> np.ndarray:
    """Fraction of each voxel inside the block and every half-space ``n . (x - c) <= d``.

    Each voxel is sampled on a ``subsamples**3`` lattice of cell-centred points.
    The result is the raw fraction (float64), not max-normalized.
    """
    normals = np.atleast_2d(np.asarray(normals, dtype=np.float64)).reshape(-1, 3)
    distances = np.atleast_1d(np.asarray(distances, dtype=np.float64))
    if len(normals) != len(distances):
        raise GenerationError(f"{len(normals)} normals but {len(distances)} distances")

    centre, _ = crystal_region(grid, 0.0)
    s = subsamples
    axes: list[np.ndarray] = []
    masks: list[np.ndarray] = []
    spans: list[tuple[int, int]] = []
    for axis, n in enumerate(grid.dims):
        rel = (np.arange(n * s) + 0.5) / s * grid.voxel_pitch - centre[axis]
        inside = np.abs(rel) <= half_extent[axis]
        touched = np.nonzero(inside.reshape(n, s).any(axis=1))[0]
        if touched.size == 0:
            return np.zeros(grid.dims, dtype=np.float64)
        lo, hi = int(touched[0]), int(touched[-1]) + 1
        spans.append((lo, hi))
        axes.append(rel[lo * s : hi * s])
        masks.append(inside[lo * s : hi * s])

    x, y, z = axes
    inside = masks[0][:, None, None] & masks[1][None, :, None] & masks[2][None, None, :]
    for normal, distance in zip(normals, distances, strict=True):
        proj = (
            normal[0] * x[:, None, None]
            + normal[1] * y[None, :, None]
            + normal[2] * z[None, None, :]
        )
        inside &= proj <= distance

    counts = [hi - lo for lo, hi in spans]
    fraction = inside.reshape(counts[0], s, counts[1], s, counts[2], s).mean(axis=(1, 3, 5))
    occupancy = np.zeros(grid.dims, dtype=np.float64)
    occupancy[tuple(slice(lo, hi) for lo, hi in spans)] = fraction
    return occupancy


def _raw_occupancy(spec: CrystalSpec, grid: GridSpec, subsamples: int) -> np.ndarray:
    _, half = crystal_region(grid, spec.box_padding)
    normals = np.array([p.normal for p in spec.planes], dtype=np.float64)
    distances = np.array([p.distance for p in spec.planes], dtype=np.float64)
    occupancy = voxelize_polyhedron(normals, distances, grid, half, subsamples)

    # at least 2x oversampling: nothing may leave the central half of the box
    for axis, n in enumerate(grid.dims):
        profile = occupancy.sum(axis=tuple(a for a in range(3) if a != axis))
        filled = np.nonzero(profile > 0)[0]
        if filled.size and (filled[0] < n // 4 or filled[-1] >= 3 * n // 4):
            raise GenerationError(f"crystal leaves the central half of the box along axis {axis}")
    return occupancy


def voxelize_occupancy(spec: CrystalSpec, grid: GridSpec, subsamples: int = 4) -> np.ndarray:
    """Max-normalized fractional occupancy of the crystal, float32 in [0, 1]."""
    occupancy = _raw_occupancy(spec, grid, subsamples)
    peak = occupancy.max()
    if peak <= 0:
        raise GenerationError("polyhedron is empty on this grid")
    return (occupancy / peak).astype(np.float32)


def occupancy_fraction(occupancy: np.ndarray, grid: GridSpec, box_padding: float) -> float:
    """Occupied volume over crystal-block volume."""
    _, half = crystal_region(grid, box_padding)
    block_volume = float(np.prod(2.0 * half))
    return float(occupancy.sum()) * grid.voxel_pitch**3 / block_volume


def generate_spec(seed: int, config: GeneratorConfig) -> CrystalSpec:
    """Draw a crystal recipe, redrawing until it passes the size rules.

    Raises:
        GenerationError: after ``config.max_attempts`` consecutive rejections.
    """
    rng = np.random.default_rng(seed)
    grid = config.grid
    _, half = crystal_region(grid, config.box_padding)
    radius = float(half.min())
    low, high = config.distance_range

    for attempt in range(1, config.max_attempts + 1):
        n_planes = int(rng.integers(4, 21))
        normals = [sample_plane_normal(rng, config.normal_policy) for _ in range(n_planes)]
        distances = rng.uniform(low * radius, high * radius, size=n_planes)
        strain = draw_affine_strain(rng)

        spec = CrystalSpec(
            seed=seed,
            n_planes=n_planes,
            planes=[
                ClipPlane(normal=_vector(n), distance=float(d))
                for n, d in zip(normals, distances, strict=True)
            ],
            affine_strain=_tensor(strain),
            random_field_amplitude=config.random_field_amplitude,
            random_field_smoothness=config.random_field_smoothness,
            box_padding=config.box_padding,
            include_strain=config.include_strain,
        )
        try:
            occupancy = _raw_occupancy(spec, grid, config.subsamples)
        except GenerationError as e:
            logger.debug("seed %d draw %d rejected: %s", seed, attempt, e)
            continue
        fraction = occupancy_fraction(occupancy, grid, config.box_padding)
        if fraction < config.min_occupancy_fraction:
            logger.debug("seed %d draw %d rejected: fraction %.3f", seed, attempt, fraction)
            continue

        logger.debug(
            "seed %d accepted on draw %d: %d planes, distances %s, fraction %.3f",
            seed,
            attempt,
            n_planes,
            np.round(distances, 2).tolist(),
            fraction,
        )
        return spec

    raise GenerationError(f"seed {seed}: no acceptable crystal after {config.max_attempts} draws")


def _vector(v: np.ndarray) -> tuple[float, float, float]:
    return (float(v[0]), float(v[1]), float(v[2]))


def _tensor(t: np.ndarray) -> Tensor3:
    return (_vector(t[0]), _vector(t[1]), _vector(t[2]))
