"""Assembly of one (magnitude, shape, phase) training triple."""

from dataclasses import dataclass

from cdiforge.crystalgen.geometry import voxelize_occupancy
from cdiforge.crystalgen.strain import (
    displacement_rng,
    phase_from_displacement,
    synth_displacement,
)
from cdiforge.forward import simulate_diffraction
from cdiforge.models import BraggVector, CrystalSpec, ForwardConfig, GridSpec
from cdiforge.volume import RealVolume


@dataclass(frozen=True)
class TrainingSample:
    magnitude: RealVolume
    shape: RealVolume
    phase: RealVolume


def make_sample(
    spec: CrystalSpec,
    grid: GridSpec,
    bragg: BraggVector | None = None,
    forward: ForwardConfig | None = None,
    subsamples: int = 4,
) -> TrainingSample:
    """Voxelize, displace, project and diffract one crystal recipe."""
    shape = voxelize_occupancy(spec, grid, subsamples)
    displacement = synth_displacement(spec, shape, grid, displacement_rng(spec))
    phase = phase_from_displacement(displacement, bragg)
    return TrainingSample(
        magnitude=simulate_diffraction(shape, phase, forward),
        shape=shape,
        phase=phase,
    )
