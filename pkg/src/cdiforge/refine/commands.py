"""refine subcommand."""

from pathlib import Path

import click
import numpy as np

from cdiforge.dal import read_volume, write_series_csv, write_volume
from cdiforge.errors import VolumeError
from cdiforge.refine.solver import refine as refine_object
from cdiforge.runs import load_run_config, operation, run_options, start_run
from cdiforge.volume import recombine

_volume = click.Path(dir_okay=False, path_type=Path)


@click.command("refine")
@run_options
@click.option("--input", "input_path", type=_volume, required=True, help="Magnitude (CDIV).")
@click.option("--object", "object_path", type=_volume, help="Starting complex object (CDIV).")
@click.option("--shape", "shape_path", type=_volume, help="Starting shape, e.g. pred_shape.cdiv.")
@click.option("--phase", "phase_path", type=_volume, help="Starting phase, paired with --shape.")
@operation("refine.refine")
def refine(
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    threads: int | None,
    input_path: Path,
    object_path: Path | None,
    shape_path: Path | None,
    phase_path: Path | None,
) -> None:
    """Adam refinement of a starting object against a measured magnitude."""
    config = load_run_config(config_path, seed, out, threads)
    m = read_volume(input_path)
    if object_path is not None:
        rho0 = read_volume(object_path)
        if not np.iscomplexobj(rho0):
            rho0 = rho0.astype(np.complex64)
    elif shape_path is not None and phase_path is not None:
        rho0 = recombine(read_volume(shape_path), read_volume(phase_path))
    else:
        raise VolumeError("refine needs --object or both --shape and --phase")
    constraint = config.refinement.support_constraint
    support = read_volume(constraint) > 0.5 if constraint is not None else None
    out_dir = start_run(
        config,
        "refine",
        {"input": input_path, "object": object_path, "shape": shape_path, "phase": phase_path},
    )

    result = refine_object(rho0, m, config.refinement, support)
    write_volume(out_dir / "refined_object.cdiv", result.obj)
    write_series_csv(out_dir / "loss.csv", "loss", result.loss_history)
