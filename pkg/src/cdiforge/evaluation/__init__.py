"""Ambiguity-aware error metrics, reports and the timing benchmark."""

from cdiforge.evaluation.benchmark import benchmark, benchmark_sample
from cdiforge.evaluation.metrics import (
    conjugate_twin,
    gauge_fix,
    phase_difference,
    recon_error,
    reflect,
    register,
    split_object,
    strain_map,
    twin_parts,
)
from cdiforge.evaluation.report import evaluate_network, quartiles, summarize, to_row

__all__ = [
    "benchmark",
    "benchmark_sample",
    "conjugate_twin",
    "evaluate_network",
    "gauge_fix",
    "phase_difference",
    "quartiles",
    "recon_error",
    "reflect",
    "register",
    "split_object",
    "strain_map",
    "summarize",
    "to_row",
    "twin_parts",
]
