"""Dataset materialization and experimental-volume ingestion."""

from cdiforge.dataset.builder import build_dataset, plan_split
from cdiforge.dataset.ingest import centroid_crop, ingest_experimental, pad_even

__all__ = [
    "build_dataset",
    "centroid_crop",
    "ingest_experimental",
    "pad_even",
    "plan_split",
]
