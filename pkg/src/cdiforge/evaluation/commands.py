"""evaluate and benchmark subcommands."""

from pathlib import Path

import click

from cdiforge.dal import (
    DatasetStore,
    load_network,
    read_volume,
    write_json,
    write_rows_csv,
)
from cdiforge.errors import BenchmarkError, VolumeError
from cdiforge.evaluation.benchmark import benchmark as run_benchmark
from cdiforge.evaluation.metrics import recon_error
from cdiforge.evaluation.report import evaluate_network, summarize
from cdiforge.retrieval import fourier_error
from cdiforge.runs import load_run_config, operation, run_options, start_run
from cdiforge.volume import recombine

_volume = click.Path(dir_okay=False, path_type=Path)
_directory = click.Path(file_okay=False, path_type=Path)


@click.command("evaluate")
@run_options
@click.option("--pred-shape", type=_volume, help="Predicted shape (CDIV).")
@click.option("--pred-phase", type=_volume, help="Predicted phase (CDIV).")
@click.option("--true-shape", type=_volume, help="Ground-truth shape (CDIV).")
@click.option("--true-phase", type=_volume, help="Ground-truth phase (CDIV).")
@click.option("--magnitude", type=_volume, help="Measured magnitude, for chi^2 (CDIV).")
@click.option("--dataset", type=_directory, help="Dataset to score a network over.")
@click.option("--weights", type=_volume, help="Network weights (CDNW), with --dataset.")
@click.option(
    "--split",
    type=click.Choice(["train", "test"]),
    default="test",
    show_default=True,
    help="Dataset split to score.",
)
@operation("evaluation.recon_error")
def evaluate(
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    threads: int | None,
    pred_shape: Path | None,
    pred_phase: Path | None,
    true_shape: Path | None,
    true_phase: Path | None,
    magnitude: Path | None,
    dataset: Path | None,
    weights: Path | None,
    split: str,
) -> None:
    """Ambiguity-resolved error of one prediction, or of a network over a dataset split.

    With the four volume paths the error is printed as JSON. With --dataset
    and --weights a per-sample CSV and a summary JSON go to the output
    directory.
    """
    config = load_run_config(config_path, seed, out, threads)
    if pred_shape and pred_phase and true_shape and true_phase:
        pred_s, pred_p = read_volume(pred_shape), read_volume(pred_phase)
        true_s, true_p = read_volume(true_shape), read_volume(true_phase)
        chi2 = None
        if magnitude is not None:
            chi2 = fourier_error(recombine(pred_s, pred_p), read_volume(magnitude), normalize=True)
        error = recon_error(pred_s, pred_p, true_s, true_p, config.evaluation.phase_weight, chi2)
        click.echo(error.model_dump_json(indent=2))
        return
    if dataset is None or weights is None:
        raise VolumeError(
            "evaluate needs --pred-shape, --pred-phase, --true-shape and --true-phase, "
            "or --dataset with --weights"
        )

    network = load_network(weights)
    out_dir = start_run(
        config, "evaluate", {"dataset": dataset, "weights": weights, "split": split}
    )
    samples = ((record.id, sample) for record, sample in DatasetStore(dataset).samples(split))
    rows = evaluate_network(samples, network, config.evaluation)
    write_rows_csv(out_dir / "errors.csv", rows)
    write_json(out_dir / "errors_summary.json", [s.model_dump() for s in summarize(rows)])


@click.command("benchmark")
@run_options
@click.option("--dataset", type=_directory, required=True, help="Dataset directory.")
@click.option("--weights", type=_volume, required=True, help="Trained weights (CDNW).")
@operation("evaluation.benchmark")
def benchmark(
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    threads: int | None,
    dataset: Path,
    weights: Path,
) -> None:
    """Time network inference, inference plus refinement, and iterative retrieval.

    Uses the first ``evaluation.benchmark_samples`` test samples (training
    samples when the test split is empty) on a single thread.
    """
    config = load_run_config(config_path, seed, out, threads)
    if not weights.is_file():
        raise BenchmarkError(f"no trained weights at {weights}")
    network = load_network(weights)
    store = DatasetStore(dataset)
    manifest = store.read_manifest()
    records = [r for r in manifest.samples if r.split == "test"] or manifest.samples
    chosen = records[: config.evaluation.benchmark_samples]
    samples = [(r.id, store.read_sample(r)) for r in chosen]
    out_dir = start_run(config, "benchmark", {"dataset": dataset, "weights": weights})

    report = run_benchmark(
        samples,
        network,
        config.retrieval,
        config.refinement,
        config.evaluation,
        config.seed,
    )
    write_rows_csv(out_dir / "benchmark.csv", report.rows)
    write_json(
        out_dir / "benchmark_summary.json", report.model_dump(mode="json", exclude={"rows"})
    )
