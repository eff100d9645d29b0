"""ER/HIO phase retrieval with shrink-wrap and final-iterate averaging."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import cycle

import numpy as np

from cdiforge.errors import ConvergenceError, VolumeError
from cdiforge.models import PRConfig
from cdiforge.retrieval.projections import (
    autocorrelation_support,
    er_combine,
    fourier_error,
    hio_combine,
    project_spectrum,
    shrinkwrap,
)
from cdiforge.volume import (
    ComplexVolume,
    RealVolume,
    Support,
    complex_dtype,
    ensure_finite,
    fft3_centered,
    ifft3_centered,
    require_even,
    require_same_dims,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RetrievalResult:
    """Averaged object, per-iteration chi^2, and the final support of one run."""

    obj: ComplexVolume
    chi2_history: np.ndarray
    support: Support
    final_chi2: float

    @property
    def final_chi(self) -> float:
        return math.sqrt(self.final_chi2)


def algorithm_schedule(config: PRConfig) -> list[str]:
    """The block pattern repeated cyclically and cut to ``total_iters`` entries."""
    steps = (name for name, count in cycle(config.block_pattern) for _ in range(count))
    return [next(steps) for _ in range(config.total_iters)]


def random_start(m: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Object whose spectrum has modulus m and uniform random phases."""
    angles = rng.uniform(-math.pi, math.pi, size=m.shape)
    return ifft3_centered(m * np.exp(1j * angles))


def run_phase_retrieval(
    m: RealVolume,
    config: PRConfig,
    rng: np.random.Generator,
    init: ComplexVolume | None = None,
    support: Support | None = None,
) -> RetrievalResult:
    """Run one retrieval from a random or provided start.

    Args:
        m: Measured magnitude, normalized the way the forward model stores it.
        config: Schedule and shrink-wrap parameters.
        rng: Source of the random start phases.
        init: Starting object; required when ``config.init`` is ``provided``.
        support: Starting support; defaults to the thresholded autocorrelation.

    Raises:
        ConvergenceError: if shrink-wrap empties the support or an iterate blows up.
    """
    require_even(m.shape, "run_phase_retrieval")
    ensure_finite(m, "diffraction magnitude")
    data = np.asarray(m, dtype=np.float64)
    norm = float(np.sum(data**2))
    if norm <= 0:
        raise VolumeError("run_phase_retrieval: magnitude is identically zero")

    if init is not None:
        require_same_dims(init, m, "run_phase_retrieval")
        rho = np.asarray(init, dtype=np.complex128).copy()
    elif config.init == "provided":
        raise VolumeError("run_phase_retrieval: init=provided but no starting object given")
    else:
        rho = random_start(data, rng)

    if support is None:
        support = autocorrelation_support(data, config.autocorr_threshold)
    else:
        require_same_dims(support, m, "run_phase_retrieval")
        support = np.asarray(support, dtype=bool).copy()

    schedule = algorithm_schedule(config)
    history = np.empty(config.total_iters, dtype=np.float64)
    average = np.zeros(m.shape, dtype=np.complex128)
    first_averaged = config.total_iters - config.average_last

    for k, algorithm in enumerate(schedule):
        spectrum = fft3_centered(rho)
        modulus = np.abs(spectrum)
        history[k] = float(np.sum((modulus - data) ** 2) / norm)
        if not math.isfinite(history[k]):
            raise ConvergenceError("retrieval iterate became non-finite", k)

        projected = project_spectrum(spectrum, data, config.epsilon, modulus)
        if algorithm == "ER":
            rho = er_combine(projected, support)
        else:
            rho = hio_combine(rho, projected, support, config.beta)

        if config.shrinkwrap and (k + 1) % config.shrinkwrap_interval == 0:
            support = shrinkwrap(rho, config.shrinkwrap_sigma, config.shrinkwrap_threshold, k)
            logger.debug("iteration %d: chi2 %.3e, support %d voxels", k, history[k], support.sum())

        if k >= first_averaged:
            average += er_combine(rho, support)

    average /= config.average_last
    final_chi2 = fourier_error(average, data)
    return RetrievalResult(
        obj=average.astype(complex_dtype(m)),
        chi2_history=history,
        support=support,
        final_chi2=final_chi2,
    )


def run_restarts(
    m: RealVolume,
    config: PRConfig,
    seed: int,
    threads: int = 1,
    init: ComplexVolume | None = None,
    support: Support | None = None,
) -> RetrievalResult:
    """Run ``config.restarts`` independent retrievals and keep the lowest final chi.

    Each restart draws from its own child of ``SeedSequence(seed)``, so the
    result does not depend on the thread count.
    """
    children = np.random.SeedSequence(seed).spawn(config.restarts)

    def run(child: np.random.SeedSequence) -> RetrievalResult:
        return run_phase_retrieval(m, config, np.random.default_rng(child), init, support)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(run, children))

    best = min(range(len(results)), key=lambda i: results[i].final_chi2)
    logger.info(
        "retrieval: %d restarts, final chi %s, kept restart %d",
        len(results),
        [round(r.final_chi, 5) for r in results],
        best,
    )
    return results[best]

