"""Deterministic synthesis of faceted, strained nanocrystals."""

from cdiforge.crystalgen.geometry import (
    crystal_region,
    derive_sample_seed,
    draw_affine_strain,
    generate_spec,
    occupancy_fraction,
    sample_plane_normal,
    sample_unit_normal,
    voxelize_occupancy,
    voxelize_polyhedron,
)
from cdiforge.crystalgen.sample import TrainingSample, make_sample
from cdiforge.crystalgen.strain import (
    DisplacementField,
    displacement_rng,
    phase_from_displacement,
    synth_displacement,
    voxel_centres,
)

__all__ = [
    "DisplacementField",
    "TrainingSample",
    "crystal_region",
    "derive_sample_seed",
    "displacement_rng",
    "draw_affine_strain",
    "generate_spec",
    "make_sample",
    "occupancy_fraction",
    "phase_from_displacement",
    "sample_plane_normal",
    "sample_unit_normal",
    "synth_displacement",
    "voxel_centres",
    "voxelize_occupancy",
    "voxelize_polyhedron",
]
