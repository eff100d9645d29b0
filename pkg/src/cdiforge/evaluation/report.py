"""Per-sample error rows and their distribution summaries."""

import logging
from collections.abc import Iterable, Sequence

import numpy as np

from cdiforge.crystalgen.sample import TrainingSample
from cdiforge.evaluation.metrics import recon_error
from cdiforge.models import BenchmarkRow, EvaluationConfig, MethodSummary, Quartiles, ReconError
from cdiforge.models.schemas import Method
from cdiforge.nn import CdiNetwork, predict
from cdiforge.retrieval import fourier_error
from cdiforge.volume import recombine

logger = logging.getLogger(__name__)


def to_row(sample_id: str, method: Method, error: ReconError, wall_ms: float) -> BenchmarkRow:
    return BenchmarkRow(
        sample_id=sample_id,
        method=method,
        shape_mae=error.shape_mae,
        phase_mae=error.phase_mae,
        chi2=error.chi2 if error.chi2 is not None else float("nan"),
        twin_used=error.twin_used,
        wall_ms=wall_ms,
    )


def quartiles(values: Sequence[float]) -> Quartiles:
    q1, median, q3 = np.percentile(np.asarray(values, dtype=np.float64), [25, 50, 75])
    return Quartiles(q1=float(q1), median=float(median), q3=float(q3))


def summarize(rows: Sequence[BenchmarkRow]) -> list[MethodSummary]:
    """Median and quartiles of every column, per method, in first-seen method order."""
    methods = list(dict.fromkeys(row.method for row in rows))
    summaries = []
    for method in methods:
        group = [row for row in rows if row.method == method]
        summaries.append(
            MethodSummary(
                method=method,
                count=len(group),
                shape_mae=quartiles([r.shape_mae for r in group]),
                phase_mae=quartiles([r.phase_mae for r in group]),
                chi2=quartiles([r.chi2 for r in group]),
                wall_ms=quartiles([r.wall_ms for r in group]),
                twin_rate=sum(r.twin_used for r in group) / len(group),
            )
        )
    return summaries


def evaluate_network(
    samples: Iterable[tuple[str, TrainingSample]],
    network: CdiNetwork,
    config: EvaluationConfig | None = None,
) -> list[BenchmarkRow]:
    """Score network predictions over a sample set, one ``nn`` row per sample."""
    config = config or EvaluationConfig()
    rows = []
    for sample_id, sample in samples:
        prediction = predict(sample.magnitude, network)
        chi2 = fourier_error(
            recombine(prediction.shape, prediction.phase), sample.magnitude, normalize=True
        )
        error = recon_error(
            prediction.shape,
            prediction.phase,
            sample.shape,
            sample.phase,
            config.phase_weight,
            chi2,
        )
        rows.append(to_row(sample_id, "nn", error, prediction.wall_ms))
        logger.debug(
            "%s: shape %.4f phase %.4f twin %s",
            sample_id,
            error.shape_mae,
            error.phase_mae,
            error.twin_used,
        )
    logger.info("evaluated %d samples", len(rows))
    return rows
