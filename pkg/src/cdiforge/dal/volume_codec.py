"""CDIV binary volume codec.

Layout: magic ``CDIV``, u8 version, u8 dtype (0 real f32, 1 complex f32
pairs), u16 zero padding, three u32 dims, then the little-endian payload in
C order. Every file in a dataset goes through here.
"""

import struct
from pathlib import Path

import numpy as np

from cdiforge.errors import FormatError, VolumeError
from cdiforge.volume import ensure_finite

MAGIC = b"CDIV"
VERSION = 1
DTYPE_REAL = 0
DTYPE_COMPLEX = 1

_HEADER = struct.Struct("<4sBBH3I")
HEADER_SIZE = _HEADER.size  # 20 bytes

_PAYLOAD_DTYPES = {DTYPE_REAL: np.dtype("<f4"), DTYPE_COMPLEX: np.dtype("<c8")}


def encode_volume(vol: np.ndarray) -> bytes:
    """Serialize a 3D real, boolean or complex volume to CDIV bytes.

    Boolean supports are stored as real 0.0 / 1.0.
    """
    if vol.ndim != 3:
        raise VolumeError(f"CDIV volumes are 3D, got shape {vol.shape}")
    if np.iscomplexobj(vol):
        code = DTYPE_COMPLEX
    else:
        code = DTYPE_REAL
        vol = vol.astype(np.float32)
    ensure_finite(vol, "volume to encode")
    payload = np.ascontiguousarray(vol, dtype=_PAYLOAD_DTYPES[code]).tobytes()
    nx, ny, nz = vol.shape
    return _HEADER.pack(MAGIC, VERSION, code, 0, nx, ny, nz) + payload


def decode_volume(data: bytes) -> np.ndarray:
    """Parse CDIV bytes into a float32 or complex64 array."""
    if len(data) < HEADER_SIZE:
        raise FormatError(f"CDIV data too short for header: {len(data)} bytes")
    try:
        magic, version, code, _pad, nx, ny, nz = _HEADER.unpack_from(data)
    except struct.error as e:
        raise FormatError(f"unreadable CDIV header: {e}") from e
    if magic != MAGIC:
        raise FormatError(f"bad CDIV magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported CDIV version {version}")
    if code not in _PAYLOAD_DTYPES:
        raise FormatError(f"unknown CDIV dtype code {code}")

    dtype = _PAYLOAD_DTYPES[code]
    expected = nx * ny * nz * dtype.itemsize
    actual = len(data) - HEADER_SIZE
    if actual != expected:
        raise FormatError(f"CDIV payload is {actual} bytes, dims {(nx, ny, nz)} need {expected}")

    vol = np.frombuffer(data, dtype=dtype, offset=HEADER_SIZE).reshape(nx, ny, nz)
    native = np.complex64 if code == DTYPE_COMPLEX else np.float32
    return vol.astype(native)


def write_volume(path: Path, vol: np.ndarray) -> None:
    """Encode and write a volume, creating parent directories."""
    data = encode_volume(vol)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def read_volume(path: Path) -> np.ndarray:
    try:
        return decode_volume(path.read_bytes())
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from e
