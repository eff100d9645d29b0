"""generate, resample and validate subcommands."""

from pathlib import Path

import click

from cdiforge.dal import DatasetStore, read_volume, read_weights, write_volume
from cdiforge.dataset.builder import build_dataset
from cdiforge.dataset.ingest import ingest_experimental
from cdiforge.errors import FormatError
from cdiforge.runs import load_run_config, operation, run_options, start_run


@click.command("generate")
@run_options
@click.option("--count", type=click.IntRange(min=1), required=True, help="Strained samples.")
@click.option(
    "--controls",
    type=click.IntRange(min=1),
    help="Strain-free samples sharing geometry with the strained ones; defaults to --count.",
)
@click.option(
    "--test-fraction",
    type=click.FloatRange(0, 1, max_open=True),
    default=0.1,
    show_default=True,
    help="Fraction of geometries held out for testing.",
)
@operation("dataset.build_dataset")
def generate(
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    threads: int | None,
    count: int,
    controls: int | None,
    test_fraction: float,
) -> None:
    """Generate a paired strained / strain-free dataset."""
    config = load_run_config(config_path, seed, out, threads)
    out_dir = start_run(
        config,
        "generate",
        {"count": count, "controls": controls or count, "test_fraction": test_fraction},
    )
    build_dataset(
        n_strained=count,
        n_unstrained=controls or count,
        split_fraction=test_fraction,
        seed=config.seed,
        out_dir=out_dir,
        config=config.generator,
        forward=config.forward,
        threads=config.threads,
    )


@click.command("resample")
@run_options
@click.option(
    "--input",
    "input_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Magnitude volume (CDIV) of any dims.",
)
@click.option(
    "--dims",
    type=(int, int, int),
    help="Target dims; defaults to the network input size.",
)
@operation("dataset.ingest_experimental")
def resample(
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    threads: int | None,
    input_path: Path,
    dims: tuple[int, int, int] | None,
) -> None:
    """Crop and DCT-resample a measured magnitude onto the network grid."""
    config = load_run_config(config_path, seed, out, threads)
    target = dims or (config.network.input_dim,) * 3
    out_dir = start_run(config, "resample", {"input": input_path, "dims": target})
    vol = read_volume(input_path)
    write_volume(out_dir / f"{input_path.stem}_resampled.cdiv", ingest_experimental(vol, target))


@click.command("validate")
@click.argument("paths", nargs=-1, required=True, type=click.Path(path_type=Path))
@operation("dal.validate")
def validate(paths: tuple[Path, ...]) -> None:
    """Check CDIV volumes, CDNW weights and dataset directories.

    Prints one verdict per path and exits non-zero if any is invalid.
    """
    failures = 0
    for path in paths:
        problems: list[str] = []
        try:
            if path.is_dir():
                problems = DatasetStore(path).validate()
            elif path.suffix == ".cdnw":
                read_weights(path)
            else:
                read_volume(path)
        except (ValueError, OSError) as e:
            problems = [str(e)]
        if problems:
            failures += 1
            for problem in problems:
                click.echo(f"invalid {path}: {problem}")
        else:
            click.echo(f"ok {path}")
    if failures:
        raise FormatError(f"{failures} of {len(paths)} inputs invalid")
