"""retrieve subcommand."""

from pathlib import Path

import click

from cdiforge.dal import read_volume, write_series_csv, write_volume
from cdiforge.errors import VolumeError
from cdiforge.retrieval.projections import support_volume
from cdiforge.retrieval.solver import run_restarts
from cdiforge.runs import load_run_config, operation, run_options, start_run
from cdiforge.volume import recombine

_volume = click.Path(dir_okay=False, path_type=Path)


@click.command("retrieve")
@run_options
@click.option("--input", "input_path", type=_volume, required=True, help="Magnitude (CDIV).")
@click.option("--init-shape", type=_volume, help="Starting shape, e.g. a network prediction.")
@click.option("--init-phase", type=_volume, help="Starting phase, paired with --init-shape.")
@click.option("--support", "support_path", type=_volume, help="Starting support (0/1 CDIV).")
@operation("retrieval.run_phase_retrieval")
def retrieve(
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    threads: int | None,
    input_path: Path,
    init_shape: Path | None,
    init_phase: Path | None,
    support_path: Path | None,
) -> None:
    """Iterative HIO/ER retrieval with shrink-wrap and random restarts.

    Writes the averaged object, its final support and the chi^2 trace of
    the kept restart.
    """
    config = load_run_config(config_path, seed, out, threads)
    if (init_shape is None) != (init_phase is None):
        raise VolumeError("--init-shape and --init-phase must be given together")
    m = read_volume(input_path)
    init = None
    if init_shape is not None and init_phase is not None:
        init = recombine(read_volume(init_shape), read_volume(init_phase))
    support = read_volume(support_path) > 0.5 if support_path is not None else None
    out_dir = start_run(
        config,
        "retrieve",
        {
            "input": input_path,
            "init_shape": init_shape,
            "init_phase": init_phase,
            "support": support_path,
        },
    )

    result = run_restarts(m, config.retrieval, config.seed, config.threads, init, support)
    write_volume(out_dir / "retrieved_object.cdiv", result.obj)
    write_volume(out_dir / "retrieved_support.cdiv", support_volume(result.support))
    write_series_csv(out_dir / "chi2.csv", "chi2", result.chi2_history)
