"""Pydantic schemas for configuration and serialized records."""

import math
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cdiforge.config import Config, default_threads

TWO_PI = 2.0 * math.pi
STRAIN_LIMIT = 0.01

Algorithm = Literal["HIO", "ER"]
Method = Literal["nn", "nn_refine", "retrieval"]
Vector3 = tuple[float, float, float]
Tensor3 = tuple[Vector3, Vector3, Vector3]


class StrictModel(BaseModel):
    """Base for every config and record: unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")


# Geometry and generation


class GridSpec(StrictModel):
    """Voxel grid. Dims must be even so the centre voxel n/2 is unambiguous."""

    dims: tuple[int, int, int] = (32, 32, 32)
    voxel_pitch: float = Field(default=2.0, gt=0)  # lattice units per voxel

    @field_validator("dims")
    @classmethod
    def _even_dims(cls, dims: tuple[int, int, int]) -> tuple[int, int, int]:
        if any(n < 2 or n % 2 for n in dims):
            raise ValueError(f"grid dims must be even and >= 2, got {dims}")
        return dims

    @property
    def extent(self) -> Vector3:
        """Box edge lengths in lattice units."""
        nx, ny, nz = self.dims
        return (nx * self.voxel_pitch, ny * self.voxel_pitch, nz * self.voxel_pitch)


class ClipPlane(StrictModel):
    """Half-space {x : normal . (x - centre) <= distance}."""

    normal: Vector3
    distance: float = Field(gt=0)

    @field_validator("normal")
    @classmethod
    def _unit_normal(cls, normal: Vector3) -> Vector3:
        norm = math.sqrt(sum(c * c for c in normal))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"clip plane normal must be a unit vector, got norm {norm}")
        return normal


class BraggVector(StrictModel):
    """Reciprocal-lattice vector of the measured reflection, normalized lattice units."""

    g: Vector3 = (TWO_PI, TWO_PI, TWO_PI)


class CrystalSpec(StrictModel):
    """Deterministic recipe for one synthetic crystal."""

    seed: int = Field(ge=0, lt=2**64)
    n_planes: int = Field(ge=4, le=20)
    planes: list[ClipPlane]
    affine_strain: Tensor3
    random_field_amplitude: float = Field(default=0.05, ge=0)
    random_field_smoothness: float = Field(default=3.0, ge=0)
    box_padding: float = Field(default=5.0, ge=0)
    include_strain: bool = True

    @model_validator(mode="after")
    def _check_recipe(self) -> "CrystalSpec":
        if len(self.planes) != self.n_planes:
            raise ValueError(f"n_planes={self.n_planes} but {len(self.planes)} planes given")
        eps = self.affine_strain
        for i in range(3):
            if abs(eps[i][i]) > STRAIN_LIMIT + 1e-12:
                raise ValueError(f"normal strain component {i}{i} exceeds {STRAIN_LIMIT}")
            for j in range(i + 1, 3):
                if abs(eps[i][j] - eps[j][i]) > 1e-12:
                    raise ValueError("affine strain tensor must be symmetric")
                # engineering shear strain is twice the tensor component
                if abs(2.0 * eps[i][j]) > STRAIN_LIMIT + 1e-12:
                    raise ValueError(f"shear strain component {i}{j} exceeds {STRAIN_LIMIT}")
        return self


class GeneratorConfig(StrictModel):
    """Knobs for crystal synthesis and sample assembly."""

    grid: GridSpec = Field(default_factory=GridSpec)
    random_field_amplitude: float = Field(default=0.05, ge=0)
    random_field_smoothness: float = Field(default=3.0, ge=0)
    box_padding: float = Field(default=5.0, ge=0)
    include_strain: bool = True
    subsamples: int = Field(default=4, ge=1)
    max_attempts: int = Field(default=64, ge=1)
    min_occupancy_fraction: float = Field(default=0.05, gt=0, lt=1)
    distance_range: tuple[float, float] = (0.25, 0.9)
    normal_policy: Literal["uniform", "high_symmetry"] = "uniform"
    bragg: BraggVector = Field(default_factory=BraggVector)

    @field_validator("distance_range")
    @classmethod
    def _ordered_range(cls, bounds: tuple[float, float]) -> tuple[float, float]:
        low, high = bounds
        if not 0 < low <= high:
            raise ValueError(f"distance_range must satisfy 0 < low <= high, got {bounds}")
        return bounds


# Solvers


class ForwardConfig(StrictModel):
    """Forward-model options."""

    normalize: bool = True
    epsilon: float = Field(default=1e-12, gt=0)


class PRConfig(StrictModel):
    """Iterative phase retrieval schedule and shrink-wrap parameters."""

    total_iters: int = Field(default=620, ge=1)
    block_pattern: list[tuple[Algorithm, int]] = [("HIO", 40), ("ER", 20)]
    beta: float = Field(default=0.9, gt=0, le=1)
    shrinkwrap: bool = True
    shrinkwrap_sigma: float = Field(default=1.0, ge=0)
    shrinkwrap_threshold: float = Field(default=0.1, gt=0, lt=1)
    shrinkwrap_interval: int = Field(default=20, ge=1)
    average_last: int = Field(default=20, ge=1)
    init: Literal["random", "provided"] = "random"
    restarts: int = Field(default=3, ge=1)
    autocorr_threshold: float = Field(default=0.004, gt=0, lt=1)
    epsilon: float = Field(default=1e-12, gt=0)

    @model_validator(mode="after")
    def _check_schedule(self) -> "PRConfig":
        if self.average_last > self.total_iters:
            raise ValueError("average_last must not exceed total_iters")
        if not self.block_pattern or any(count < 1 for _, count in self.block_pattern):
            raise ValueError("block_pattern needs at least one block with a positive count")
        return self


class RefineConfig(StrictModel):
    """Adam refinement of a complex object against a measured magnitude."""

    iterations: int = Field(default=200, ge=1)
    step_size: float = Field(default=0.01, gt=0)
    adam_beta1: float = Field(default=0.9, ge=0, lt=1)
    adam_beta2: float = Field(default=0.999, ge=0, lt=1)
    adam_eps: float = Field(default=1e-8, gt=0)
    smoothing_eps: float = Field(default=1e-8, gt=0)
    step_schedule: Literal["constant", "cosine"] = "cosine"
    loss: Literal["magnitude_mae"] = "magnitude_mae"
    normalize: bool = True
    freeze_normalization: bool = False
    support_constraint: Path | None = None


class NetworkConfig(StrictModel):
    """Layer plan of the encoder / dual-decoder network."""

    input_dim: int = Field(default=32, ge=2)
    encoder_channels: list[int] = [16, 32, 64]
    kernel: int = Field(default=3, ge=1)
    dropout_rate: float = Field(default=0.10, ge=0, lt=1)
    input_dropout: bool = False

    @model_validator(mode="after")
    def _check_plan(self) -> "NetworkConfig":
        if not self.encoder_channels or any(c < 1 for c in self.encoder_channels):
            raise ValueError("encoder_channels must be a non-empty list of positive widths")
        if self.input_dim % (2 ** len(self.encoder_channels)):
            raise ValueError(
                f"input_dim {self.input_dim} is not divisible by 2^{len(self.encoder_channels)}"
            )
        if self.kernel % 2 == 0:
            raise ValueError(f"kernel must be odd, got {self.kernel}")
        return self

    @property
    def decoder_channels(self) -> list[int]:
        """Decoder widths: encoder widths reversed, one stage down, ending at half the first."""
        return [*self.encoder_channels[-2::-1], max(1, self.encoder_channels[0] // 2)]


class TrainConfig(StrictModel):
    """Four-stage training schedule."""

    stage_epochs: list[int] = [10, 10, 5, 5]
    batch_size: int = Field(default=16, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    adam_beta1: float = Field(default=0.9, ge=0, lt=1)
    adam_beta2: float = Field(default=0.999, ge=0, lt=1)
    adam_eps: float = Field(default=1e-7, gt=0)
    physics_weight: float = Field(default=1.0, ge=0)
    smoothing_eps: float = Field(default=1e-8, gt=0)
    validation_fraction: float = Field(default=0.1, ge=0, lt=1)
    seed: int = Field(default=0, ge=0)

    @field_validator("stage_epochs")
    @classmethod
    def _four_stages(cls, epochs: list[int]) -> list[int]:
        if len(epochs) != 4 or any(e < 0 for e in epochs):
            raise ValueError(f"stage_epochs needs four non-negative entries, got {epochs}")
        return epochs


class EvaluationConfig(StrictModel):
    """Error metrics and benchmark options."""

    phase_weight: float = Field(default=1.0, ge=0)  # selection score = shape + w * phase / pi
    benchmark_samples: int = Field(default=5, ge=1)


class RunConfig(StrictModel):
    """Everything one command-line run needs, resolved and written next to its outputs."""

    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    forward: ForwardConfig = Field(default_factory=ForwardConfig)
    retrieval: PRConfig = Field(default_factory=PRConfig)
    refinement: RefineConfig = Field(default_factory=RefineConfig)
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    training: TrainConfig = Field(default_factory=TrainConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    seed: int = Field(default=0, ge=0, lt=2**64)
    out_dir: Path = Config.OUT_DIR
    threads: int = Field(default_factory=default_threads, ge=1)

    @model_validator(mode="after")
    def _share_seed(self) -> "RunConfig":
        # training follows the run seed unless its section pins one
        if "seed" not in self.training.model_fields_set:
            self.training = self.training.model_copy(update={"seed": self.seed})
        return self


# Records


class SampleRecord(StrictModel):
    """One generated sample as listed in the manifest."""

    id: str
    split: Literal["train", "test"]
    seed: int = Field(ge=0, lt=2**64)
    include_strain: bool
    n_planes: int
    strain: Tensor3
    shape_path: str
    phase_path: str
    magnitude_path: str


class SplitCounts(StrictModel):
    """Sample counts per split."""

    train: int = Field(ge=0)
    test: int = Field(ge=0)


class DatasetManifest(StrictModel):
    """Contents of ``manifest.json``."""

    format_version: int = 1
    dataset_seed: int = Field(ge=0, lt=2**64)
    dims: tuple[int, int, int]
    voxel_pitch: float
    normalization: Literal["max", "none"] = "max"
    bragg_vector: Vector3
    counts: SplitCounts
    samples: list[SampleRecord]

    @model_validator(mode="after")
    def _check_samples(self) -> "DatasetManifest":
        ids = [s.id for s in self.samples]
        if len(ids) != len(set(ids)):
            raise ValueError("sample ids must be unique")
        train_seeds = {s.seed for s in self.samples if s.split == "train"}
        test_seeds = {s.seed for s in self.samples if s.split == "test"}
        if train_seeds & test_seeds:
            raise ValueError("a geometry seed appears in both train and test splits")
        counted = SplitCounts(
            train=sum(s.split == "train" for s in self.samples),
            test=sum(s.split == "test" for s in self.samples),
        )
        if counted != self.counts:
            raise ValueError(f"counts {self.counts} do not match listed samples {counted}")
        return self


class ReconError(StrictModel):
    """Ambiguity-resolved reconstruction error."""

    shape_mae: float = Field(ge=0)
    phase_mae: float = Field(ge=0, le=math.pi + 1e-9)
    chi2: float | None = None
    twin_used: bool = False
    shift_used: tuple[int, int, int] = (0, 0, 0)


class EpochMetrics(StrictModel):
    """Validation metrics at the end of one training epoch."""

    stage: int = Field(ge=1, le=4)
    epoch: int = Field(ge=1)
    train_loss: float
    val_shape_mae: float
    val_phase_mae: float
    val_physics: float
    val_total: float
    seconds: float


class BenchmarkRow(StrictModel):
    """One (sample, method) line of the benchmark report."""

    sample_id: str
    method: Method
    shape_mae: float
    phase_mae: float
    chi2: float
    twin_used: bool
    wall_ms: float


class Quartiles(StrictModel):
    q1: float
    median: float
    q3: float


class MethodSummary(StrictModel):
    """Distribution of errors and timings for one method over a sample set."""

    method: Method
    count: int = Field(ge=1)
    shape_mae: Quartiles
    phase_mae: Quartiles
    chi2: Quartiles
    wall_ms: Quartiles
    twin_rate: float = Field(ge=0, le=1)


class BenchmarkReport(StrictModel):
    """Rows, per-method summaries, and speed ratios relative to iterative retrieval."""

    rows: list[BenchmarkRow]
    summary: list[MethodSummary]
    retrieval_over_nn: float
    retrieval_over_nn_refine: float
