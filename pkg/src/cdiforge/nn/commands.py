"""train and predict subcommands."""

import logging
from dataclasses import asdict
from pathlib import Path

import click

from cdiforge.dal import (
    DatasetStore,
    load_network,
    read_volume,
    save_network,
    write_json,
    write_volume,
)
from cdiforge.errors import ConfigError
from cdiforge.nn.network import predict as predict_volume
from cdiforge.nn.trainer import train as train_network
from cdiforge.runs import load_run_config, operation, run_options, start_run

logger = logging.getLogger(__name__)

WEIGHTS_NAME = "weights.cdnw"


@click.command("train")
@run_options
@click.option(
    "--dataset",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
    help="Dataset directory written by generate.",
)
@operation("nn.train")
def train(
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    threads: int | None,
    dataset: Path,
) -> None:
    """Train the encoder / dual-decoder network on a dataset's training split."""
    config = load_run_config(config_path, seed, out, threads)
    store = DatasetStore(dataset)
    manifest = store.read_manifest()
    expected = (config.network.input_dim,) * 3
    if tuple(manifest.dims) != expected:
        raise ConfigError(f"network.input_dim gives {expected} but {dataset} holds {manifest.dims}")
    out_dir = start_run(config, "train", {"dataset": dataset})

    samples = [sample for _, sample in store.samples("train")]
    result = train_network(samples, config.network, config.training)
    save_network(out_dir / WEIGHTS_NAME, result.network)
    write_json(
        out_dir / "training_metrics.json",
        {
            "baseline": asdict(result.baseline),
            "epochs": [m.model_dump() for m in result.metrics],
        },
    )


@click.command("predict")
@run_options
@click.option(
    "--weights",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Trained weights (CDNW).",
)
@click.option(
    "--input",
    "input_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Diffraction magnitude (CDIV).",
)
@operation("nn.predict")
def predict(
    config_path: Path | None,
    seed: int | None,
    out: Path | None,
    threads: int | None,
    weights: Path,
    input_path: Path,
) -> None:
    """Predict shape and phase from one magnitude volume."""
    config = load_run_config(config_path, seed, out, threads)
    network = load_network(weights)
    m = read_volume(input_path)
    out_dir = start_run(config, "predict", {"weights": weights, "input": input_path})

    prediction = predict_volume(m, network)
    write_volume(out_dir / "pred_shape.cdiv", prediction.shape)
    write_volume(out_dir / "pred_phase.cdiv", prediction.phase)
    logger.info("predicted %s in %.1f ms", input_path.name, prediction.wall_ms)
