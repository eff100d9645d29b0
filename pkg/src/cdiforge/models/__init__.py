"""Configuration models and serialized records."""

from cdiforge.models.schemas import (
    BenchmarkReport,
    BenchmarkRow,
    BraggVector,
    ClipPlane,
    CrystalSpec,
    DatasetManifest,
    EpochMetrics,
    EvaluationConfig,
    ForwardConfig,
    GeneratorConfig,
    GridSpec,
    MethodSummary,
    NetworkConfig,
    PRConfig,
    Quartiles,
    ReconError,
    RefineConfig,
    RunConfig,
    SampleRecord,
    SplitCounts,
    TrainConfig,
)

__all__ = [
    "BenchmarkReport",
    "BenchmarkRow",
    "BraggVector",
    "ClipPlane",
    "CrystalSpec",
    "DatasetManifest",
    "EpochMetrics",
    "EvaluationConfig",
    "ForwardConfig",
    "GeneratorConfig",
    "GridSpec",
    "MethodSummary",
    "NetworkConfig",
    "PRConfig",
    "Quartiles",
    "ReconError",
    "RefineConfig",
    "RunConfig",
    "SampleRecord",
    "SplitCounts",
    "TrainConfig",
]
