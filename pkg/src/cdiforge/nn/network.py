"""Encoder / dual-decoder network: one encoder, a shape head and a phase head."""

import math
import time
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Literal

import numpy as np

from cdiforge.errors import VolumeError
from cdiforge.models import NetworkConfig
from cdiforge.nn.layers import (
    Conv3d,
    Dropout,
    MaxPool2,
    Module,
    ReLU,
    ScaledTanh,
    Sequential,
    Sigmoid,
    Upsample2,
)
from cdiforge.volume import RealVolume

Branch = Literal["encoder", "shape", "phase"]
BRANCHES: tuple[Branch, ...] = ("encoder", "shape", "phase")

# Separates dropout draws from weight-init draws of the same seed.
_DROPOUT_STREAM = 0xD40


def parameter_plan(config: NetworkConfig) -> list[tuple[str, tuple[int, ...]]]:
    """Name and shape of every parameter tensor, in serialization order.

    Encoder stages first, then the shape decoder, then the phase decoder;
    each convolution contributes its kernel followed by its bias.
    """
    k = config.kernel
    plan: list[tuple[str, tuple[int, ...]]] = []

    def conv(name: str, c_in: int, c_out: int) -> None:
        plan.append((f"{name}.weight", (c_out, c_in, k, k, k)))
        plan.append((f"{name}.bias", (c_out,)))

    c_in = 1
    for i, width in enumerate(config.encoder_channels):
        conv(f"encoder.{i}", c_in, width)
        c_in = width
    latent = config.encoder_channels[-1]
    for head in ("shape", "phase"):
        c_in = latent
        for j, width in enumerate(config.decoder_channels):
            conv(f"{head}.{j}", c_in, width)
            c_in = width
        conv(f"{head}.out", c_in, 1)
    return plan


class CdiNetwork:
    """Maps a diffraction magnitude to (shape, phase) predictions of the same size."""

    def __init__(self, config: NetworkConfig, seed: int = 0) -> None:
        self.config = config
        init_rng = np.random.default_rng(seed)
        self.dropout_rng = np.random.default_rng((seed, _DROPOUT_STREAM))
        self.encoder = self._build_encoder(init_rng)
        self.shape_decoder = self._build_decoder(init_rng, Sigmoid())
        self.phase_decoder = self._build_decoder(init_rng, ScaledTanh(math.pi))

    def _build_encoder(self, rng: np.random.Generator) -> Sequential:
        cfg = self.config
        encoder = Sequential()
        if cfg.input_dropout:
            encoder.add_module(Dropout(cfg.dropout_rate, self.dropout_rng))
        c_in = 1
        for width in cfg.encoder_channels:
            encoder.add_module(Conv3d(c_in, width, cfg.kernel, rng))
            encoder.add_module(ReLU())
            encoder.add_module(Dropout(cfg.dropout_rate, self.dropout_rng))
            encoder.add_module(MaxPool2())
            c_in = width
        return encoder

    def _build_decoder(self, rng: np.random.Generator, head: Module) -> Sequential:
        cfg = self.config
        decoder = Sequential()
        c_in = cfg.encoder_channels[-1]
        for width in cfg.decoder_channels:
            decoder.add_module(Upsample2())
            decoder.add_module(Conv3d(c_in, width, cfg.kernel, rng))
            decoder.add_module(ReLU())
            decoder.add_module(Dropout(cfg.dropout_rate, self.dropout_rng))
            c_in = width
        decoder.add_module(Conv3d(c_in, 1, cfg.kernel, rng))
        decoder.add_module(head)
        return decoder

    def branch(self, name: Branch) -> Sequential:
        branches = {
            "encoder": self.encoder,
            "shape": self.shape_decoder,
            "phase": self.phase_decoder,
        }
        return branches[name]

    # Modes
    def train(self) -> None:
        for name in BRANCHES:
            self.branch(name).train()

    def evaluate(self) -> None:
        for name in BRANCHES:
            self.branch(name).evaluate()

    # Passes
    def forward(self, magnitudes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Predict from a batch ``(B, X, Y, Z)`` of magnitudes."""
        if magnitudes.ndim != 4:
            raise VolumeError(f"expected a (batch, x, y, z) array, got {magnitudes.shape}")
        if magnitudes.shape[1:] != (self.config.input_dim,) * 3:
            raise VolumeError(
                f"network expects {self.config.input_dim}^3 inputs, got {magnitudes.shape[1:]}"
            )
        latent = self.encoder.forward(magnitudes[:, None])
        shape = self.shape_decoder.forward(latent)[:, 0]
        phase = self.phase_decoder.forward(latent)[:, 0]
        return shape, phase

    def backward(
        self,
        grad_shape: np.ndarray,
        grad_phase: np.ndarray,
        trainable: Iterable[Branch] = BRANCHES,
    ) -> None:
        """Fill parameter gradients of the trainable branches from output gradients."""
        trainable = set(trainable)
        through_encoder = "encoder" in trainable
        grad_latent = None
        for name, grad in (("shape", grad_shape), ("phase", grad_phase)):
            if name in trainable or through_encoder:
                g = self.branch(name).backward(grad[:, None])
                grad_latent = g if grad_latent is None else grad_latent + g
        if through_encoder and grad_latent is not None:
            self.encoder.backward(grad_latent)

    # Parameters
    def parameters(self, branches: Iterable[Branch] = BRANCHES) -> list[np.ndarray]:
        return [p for name in branches for p in self.branch(name).parameters()]

    def gradients(self, branches: Iterable[Branch] = BRANCHES) -> list[np.ndarray]:
        return [g for name in branches for g in self.branch(name).gradients()]

    def convolutions(self) -> list[Conv3d]:
        """Convolution layers in parameter-plan order."""
        return [m for name in BRANCHES for m in self.branch(name).modules if isinstance(m, Conv3d)]

    def get_weights(self) -> list[np.ndarray]:
        return [p.copy() for p in self.parameters()]

    def set_weights(self, tensors: list[np.ndarray]) -> None:
        """Load tensors in parameter-plan order, keeping their dtype."""
        plan = parameter_plan(self.config)
        if len(tensors) != len(plan):
            raise VolumeError(f"expected {len(plan)} tensors, got {len(tensors)}")
        for (name, shape), tensor in zip(plan, tensors, strict=True):
            if tensor.shape != shape:
                raise VolumeError(f"{name}: shape {tensor.shape}, expected {shape}")
        it = iter(tensors)
        for conv in self.convolutions():
            conv.weight = np.array(next(it))
            conv.bias = np.array(next(it))

    def astype(self, dtype: type[np.floating]) -> "CdiNetwork":
        """Cast every parameter in place; float64 is used for gradient checks."""
        self.set_weights([t.astype(dtype) for t in self.get_weights()])
        return self


@dataclass(frozen=True)
class Prediction:
    shape: RealVolume
    phase: RealVolume
    wall_ms: float


def forward_pass(
    m: RealVolume, network: CdiNetwork, mode: Literal["train", "eval"] = "eval"
) -> tuple[RealVolume, RealVolume]:
    """Run one magnitude volume through the network in the given mode."""
    if mode == "train":
        network.train()
    else:
        network.evaluate()
    shape, phase = network.forward(np.asarray(m)[None])
    return shape[0], phase[0]


def predict(m: RealVolume, network: CdiNetwork) -> Prediction:
    """Evaluation-mode prediction with its wall time."""
    start = time.perf_counter()
    shape, phase = forward_pass(m, network, "eval")
    elapsed = (time.perf_counter() - start) * 1000.0
    return Prediction(shape=shape, phase=phase, wall_ms=elapsed)
