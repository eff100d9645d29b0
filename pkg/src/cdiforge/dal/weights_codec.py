"""CDNW network weights codec.

Layout: magic ``CDNW``, u8 version, u32 header length, the NetworkConfig as
UTF-8 JSON, then every parameter tensor as little-endian f32 in layer-plan
order. Tensor shapes are not stored; they follow from the config.
"""

import math
import struct
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from cdiforge.errors import FormatError
from cdiforge.models import NetworkConfig
from cdiforge.nn.network import CdiNetwork, parameter_plan

MAGIC = b"CDNW"
VERSION = 1

_PREFIX = struct.Struct("<4sBI")


def encode_weights(config: NetworkConfig, tensors: list[np.ndarray]) -> bytes:
    plan = parameter_plan(config)
    if len(tensors) != len(plan):
        raise FormatError(f"expected {len(plan)} tensors for this config, got {len(tensors)}")
    chunks = []
    for (name, shape), tensor in zip(plan, tensors, strict=True):
        if tensor.shape != shape:
            raise FormatError(f"tensor {name} has shape {tensor.shape}, plan says {shape}")
        if not np.all(np.isfinite(tensor)):
            raise FormatError(f"tensor {name} contains non-finite values")
        chunks.append(np.ascontiguousarray(tensor, dtype="<f4").tobytes())
    header = config.model_dump_json().encode("utf-8")
    return _PREFIX.pack(MAGIC, VERSION, len(header)) + header + b"".join(chunks)


def decode_weights(data: bytes) -> tuple[NetworkConfig, list[np.ndarray]]:
    """Parse CDNW bytes into the config and its float32 parameter tensors."""
    if len(data) < _PREFIX.size:
        raise FormatError("CDNW data too short")
    magic, version, header_len = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad CDNW magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported CDNW version {version}")

    start = _PREFIX.size
    try:
        config = NetworkConfig.model_validate_json(data[start : start + header_len])
    except ValidationError as e:
        raise FormatError(f"invalid CDNW header: {e}") from e

    offset = start + header_len
    plan = parameter_plan(config)
    expected = sum(math.prod(shape) for _, shape in plan) * 4
    if len(data) - offset != expected:
        raise FormatError(f"CDNW payload is {len(data) - offset} bytes, config needs {expected}")

    tensors = []
    for _, shape in plan:
        count = math.prod(shape)
        flat = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
        tensors.append(flat.reshape(shape).astype(np.float32))
        offset += count * 4
    return config, tensors


def write_weights(path: Path, config: NetworkConfig, tensors: list[np.ndarray]) -> None:
    data = encode_weights(config, tensors)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def read_weights(path: Path) -> tuple[NetworkConfig, list[np.ndarray]]:
    try:
        return decode_weights(path.read_bytes())
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from e


def save_network(path: Path, network: CdiNetwork) -> None:
    write_weights(path, network.config, network.get_weights())


def load_network(path: Path) -> CdiNetwork:
    """Rebuild a network from a CDNW file; float32 parameters as stored."""
    config, tensors = read_weights(path)
    network = CdiNetwork(config)
    network.set_weights(tensors)
    return network
