"""Four-stage training schedule.

1. encoder + shape decoder on shape and physics terms
2. phase decoder alone on phase and physics terms
3. encoder + phase decoder on phase and physics terms
4. everything on the full loss

Each stage starts a fresh Adam over its trainable branches only, so frozen
weights are never touched.
"""

import logging
import time
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from cdiforge.crystalgen.sample import TrainingSample
from cdiforge.errors import VolumeError
from cdiforge.models import EpochMetrics, NetworkConfig, TrainConfig
from cdiforge.nn.losses import ALL_TERMS, LossTerms, Term, physics_loss
from cdiforge.nn.network import Branch, CdiNetwork
from cdiforge.refine.optimizer import Adam

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Stage:
    number: int
    trainable: tuple[Branch, ...]
    terms: frozenset[Term]


STAGES: tuple[Stage, ...] = (
    Stage(1, ("encoder", "shape"), frozenset({"shape", "physics"})),
    Stage(2, ("phase",), frozenset({"phase", "physics"})),
    Stage(3, ("encoder", "phase"), frozenset({"phase", "physics"})),
    Stage(4, ("encoder", "shape", "phase"), ALL_TERMS),
)


@dataclass(frozen=True)
class Batch:
    magnitude: np.ndarray
    shape: np.ndarray
    phase: np.ndarray

    @classmethod
    def stack(cls, samples: Sequence[TrainingSample]) -> "Batch":
        return cls(
            magnitude=np.stack([s.magnitude for s in samples]).astype(np.float32),
            shape=np.stack([s.shape for s in samples]).astype(np.float32),
            phase=np.stack([s.phase for s in samples]).astype(np.float32),
        )

    def __len__(self) -> int:
        return len(self.magnitude)

    def take(self, index: np.ndarray) -> "Batch":
        return Batch(self.magnitude[index], self.shape[index], self.phase[index])


@dataclass
class TrainResult:
    network: CdiNetwork
    metrics: list[EpochMetrics]
    baseline: LossTerms


def split_validation(
    count: int, fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded (train, validation) index split; validation is empty when fraction is 0."""
    order = rng.permutation(count)
    n_val = int(round(fraction * count))
    if fraction > 0 and count >= 2:
        n_val = min(max(n_val, 1), count - 1)
    else:
        n_val = 0
    return np.sort(order[n_val:]), np.sort(order[:n_val])


def validate(
    network: CdiNetwork, data: Batch, config: TrainConfig, batch_size: int | None = None
) -> LossTerms:
    """Full-loss terms over a data set, evaluation mode, weighted by batch size."""
    network.evaluate()
    size = batch_size or config.batch_size
    totals = np.zeros(4)
    for start in range(0, len(data), size):
        chunk = data.take(np.arange(start, min(start + size, len(data))))
        shape, phase = network.forward(chunk.magnitude)
        losses, _, _ = physics_loss(
            shape,
            phase,
            chunk.shape,
            chunk.phase,
            chunk.magnitude,
            config.physics_weight,
            config.smoothing_eps,
        )
        totals += len(chunk) * np.array([losses.shape, losses.phase, losses.physics, losses.total])
    totals /= len(data)
    return LossTerms(*(float(v) for v in totals))


def train_step(
    network: CdiNetwork,
    optimizer: Adam,
    batch: Batch,
    stage: Stage,
    config: TrainConfig,
) -> LossTerms:
    """One forward / backward / update on a batch."""
    network.train()
    shape, phase = network.forward(batch.magnitude)
    losses, grad_shape, grad_phase = physics_loss(
        shape,
        phase,
        batch.shape,
        batch.phase,
        batch.magnitude,
        config.physics_weight,
        config.smoothing_eps,
        stage.terms,
    )
    network.backward(grad_shape, grad_phase, stage.trainable)
    optimizer.step(network.gradients(stage.trainable))
    return losses


def train(
    samples: Sequence[TrainingSample],
    net_config: NetworkConfig,
    train_config: TrainConfig,
    network: CdiNetwork | None = None,
) -> TrainResult:
    """Train a network through the four stages and record validation metrics per epoch.

    Raises:
        VolumeError: if there are no samples.
    """
    if not samples:
        raise VolumeError("train: dataset is empty")
    data = Batch.stack(samples)
    rng = np.random.default_rng(train_config.seed)
    train_idx, val_idx = split_validation(len(data), train_config.validation_fraction, rng)
    train_data = data.take(train_idx)
    val_data = data.take(val_idx) if len(val_idx) else train_data

    network = network or CdiNetwork(net_config, seed=train_config.seed)
    baseline = validate(network, val_data, train_config)
    logger.info(
        "untrained: val shape %.4f phase %.4f physics %.4f",
        baseline.shape,
        baseline.phase,
        baseline.physics,
    )

    metrics: list[EpochMetrics] = []
    for stage, epochs in zip(STAGES, train_config.stage_epochs, strict=True):
        optimizer = Adam(
            network.parameters(stage.trainable),
            lr=train_config.learning_rate,
            beta1=train_config.adam_beta1,
            beta2=train_config.adam_beta2,
            eps=train_config.adam_eps,
        )
        for epoch in range(1, epochs + 1):
            started = time.perf_counter()
            order = rng.permutation(len(train_data))
            running = 0.0
            for start in range(0, len(order), train_config.batch_size):
                batch = train_data.take(order[start : start + train_config.batch_size])
                losses = train_step(network, optimizer, batch, stage, train_config)
                running += losses.total * len(batch)
            scores = validate(network, val_data, train_config)
            record = EpochMetrics(
                stage=stage.number,
                epoch=epoch,
                train_loss=running / len(train_data),
                val_shape_mae=scores.shape,
                val_phase_mae=scores.phase,
                val_physics=scores.physics,
                val_total=scores.total,
                seconds=time.perf_counter() - started,
            )
            metrics.append(record)
            logger.info(
                "stage %d epoch %d: train %.4f, val shape %.4f phase %.4f physics %.4f (%.1fs)",
                record.stage,
                record.epoch,
                record.train_loss,
                record.val_shape_mae,
                record.val_phase_mae,
                record.val_physics,
                record.seconds,
            )
    return TrainResult(network=network, metrics=metrics, baseline=baseline)
