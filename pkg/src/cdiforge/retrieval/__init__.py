"""Iterative phase retrieval: ER, HIO and shrink-wrap."""

from cdiforge.retrieval.projections import (
    autocorrelation_support,
    blur_modulus,
    er_combine,
    er_step,
    fourier_error,
    hio_combine,
    hio_step,
    modulus_project,
    project_spectrum,
    shrinkwrap,
    support_volume,
)
from cdiforge.retrieval.solver import (
    RetrievalResult,
    algorithm_schedule,
    random_start,
    run_phase_retrieval,
    run_restarts,
)

__all__ = [
    "RetrievalResult",
    "algorithm_schedule",
    "autocorrelation_support",
    "blur_modulus",
    "er_combine",
    "er_step",
    "fourier_error",
    "hio_combine",
    "hio_step",
    "modulus_project",
    "project_spectrum",
    "random_start",
    "run_phase_retrieval",
    "run_restarts",
    "shrinkwrap",
    "support_volume",
]
