"""Timing benchmark: network inference, inference plus refinement, iterative retrieval.

Every path runs on one thread, sample after sample, with native BLAS and
OpenMP pools held to one thread as well. Speed ratios are reported, not checked against any target;
the only enforced ordering is that a forward pass beats iterative retrieval.
"""

import logging
import statistics
import time
from collections.abc import Sequence

from threadpoolctl import threadpool_limits

from cdiforge.crystalgen.sample import TrainingSample
from cdiforge.errors import BenchmarkError
from cdiforge.evaluation.metrics import recon_error, split_object
from cdiforge.evaluation.report import summarize, to_row
from cdiforge.models import (
    BenchmarkReport,
    BenchmarkRow,
    EvaluationConfig,
    PRConfig,
    RefineConfig,
)
from cdiforge.nn import CdiNetwork, predict
from cdiforge.refine import refine
from cdiforge.retrieval import fourier_error, run_restarts
from cdiforge.volume import recombine

logger = logging.getLogger(__name__)


def _median_ms(rows: Sequence[BenchmarkRow], method: str) -> float:
    return statistics.median(r.wall_ms for r in rows if r.method == method)


def benchmark_sample(
    sample_id: str,
    sample: TrainingSample,
    network: CdiNetwork,
    pr_config: PRConfig,
    refine_config: RefineConfig,
    eval_config: EvaluationConfig,
    seed: int,
) -> list[BenchmarkRow]:
    """The three (sample, method) rows for one sample."""
    m = sample.magnitude

    prediction = predict(m, network)
    start_obj = recombine(prediction.shape, prediction.phase)
    nn_error = recon_error(
        prediction.shape,
        prediction.phase,
        sample.shape,
        sample.phase,
        eval_config.phase_weight,
        fourier_error(start_obj, m, normalize=True),
    )

    started = time.perf_counter()
    refined = refine(start_obj, m, refine_config)
    refine_ms = prediction.wall_ms + (time.perf_counter() - started) * 1000.0
    refined_shape, refined_phase = split_object(refined.obj)
    refine_error = recon_error(
        refined_shape,
        refined_phase,
        sample.shape,
        sample.phase,
        eval_config.phase_weight,
        fourier_error(refined.obj, m, normalize=True),
    )

    started = time.perf_counter()
    retrieved = run_restarts(m, pr_config, seed, threads=1)
    retrieval_ms = (time.perf_counter() - started) * 1000.0
    retrieved_shape, retrieved_phase = split_object(retrieved.obj)
    retrieval_error = recon_error(
        retrieved_shape,
        retrieved_phase,
        sample.shape,
        sample.phase,
        eval_config.phase_weight,
        retrieved.final_chi2,
    )

    return [
        to_row(sample_id, "nn", nn_error, prediction.wall_ms),
        to_row(sample_id, "nn_refine", refine_error, refine_ms),
        to_row(sample_id, "retrieval", retrieval_error, retrieval_ms),
    ]


def benchmark(
    samples: Sequence[tuple[str, TrainingSample]],
    network: CdiNetwork | None,
    pr_config: PRConfig | None = None,
    refine_config: RefineConfig | None = None,
    eval_config: EvaluationConfig | None = None,
    seed: int = 0,
) -> BenchmarkReport:
    """Time and score the three reconstruction paths over a sample set.

    Raises:
        BenchmarkError: if no trained network or no samples are given, or if
            the median forward pass is not faster than the median retrieval.
    """
    if network is None:
        raise BenchmarkError("benchmark needs trained network weights")
    if not samples:
        raise BenchmarkError("benchmark needs at least one sample")
    pr_config = pr_config or PRConfig()
    refine_config = refine_config or RefineConfig()
    eval_config = eval_config or EvaluationConfig()

    rows: list[BenchmarkRow] = []
    with threadpool_limits(limits=1):
        for index, (sample_id, sample) in enumerate(samples):
            rows.extend(
                benchmark_sample(
                    sample_id,
                    sample,
                    network,
                    pr_config,
                    refine_config,
                    eval_config,
                    seed + index,
                )
            )
            logger.info("benchmarked %s (%d of %d)", sample_id, index + 1, len(samples))

    nn_ms = _median_ms(rows, "nn")
    refine_ms = _median_ms(rows, "nn_refine")
    retrieval_ms = _median_ms(rows, "retrieval")
    report = BenchmarkReport(
        rows=rows,
        summary=summarize(rows),
        retrieval_over_nn=retrieval_ms / nn_ms if nn_ms > 0 else float("inf"),
        retrieval_over_nn_refine=retrieval_ms / refine_ms if refine_ms > 0 else float("inf"),
    )
    logger.info(
        "median ms: nn %.1f, nn+refine %.1f, retrieval %.1f (%.1fx and %.1fx slower)",
        nn_ms,
        refine_ms,
        retrieval_ms,
        report.retrieval_over_nn,
        report.retrieval_over_nn_refine,
    )
    if not nn_ms < retrieval_ms:
        raise BenchmarkError(
            f"network inference ({nn_ms:.1f} ms) is not faster than "
            f"retrieval ({retrieval_ms:.1f} ms)"
        )
    return report
