"""Storage layer: CDIV volumes, CDNW weights, dataset store, reports."""

import json
import struct

import numpy as np
import pytest

from cdiforge.dal import (
    DatasetStore,
    decode_volume,
    decode_weights,
    encode_volume,
    encode_weights,
    load_json,
    load_network,
    manifest_bytes,
    read_rows_csv,
    read_volume,
    save_network,
    write_json,
    write_rows_csv,
    write_series_csv,
    write_volume,
)
from cdiforge.dal.volume_codec import HEADER_SIZE
from cdiforge.errors import FormatError, VolumeError
from cdiforge.models import BenchmarkRow
from cdiforge.nn import CdiNetwork, parameter_plan


def test_cdiv_header_layout(rng):
    """Test the 20-byte header and payload size of a real volume."""
    vol = rng.random((4, 6, 8)).astype(np.float32)
    data = encode_volume(vol)

    assert HEADER_SIZE == 20
    assert data[:4] == b"CDIV"
    assert data[4] == 1  # version
    assert data[5] == 0  # real
    assert data[6:8] == b"\x00\x00"
    assert struct.unpack("<3I", data[8:20]) == (4, 6, 8)
    assert len(data) == 20 + 4 * vol.size
    # C order, little-endian f32
    assert struct.unpack("<f", data[20:24])[0] == vol[0, 0, 0]
    assert struct.unpack("<f", data[24:28])[0] == vol[0, 0, 1]


def test_cdiv_round_trip_real_and_complex(rng):
    """Test that real and complex volumes decode bit-exactly."""
    real = rng.standard_normal((4, 4, 4)).astype(np.float32)
    cplx = (rng.standard_normal((4, 4, 2)) + 1j * rng.standard_normal((4, 4, 2))).astype(
        np.complex64
    )

    np.testing.assert_array_equal(decode_volume(encode_volume(real)), real)
    data = encode_volume(cplx)
    assert data[5] == 1
    assert len(data) == 20 + 8 * cplx.size
    decoded = decode_volume(data)
    assert decoded.dtype == np.complex64
    np.testing.assert_array_equal(decoded, cplx)


def test_cdiv_support_stored_as_real(rng):
    support = rng.random((4, 4, 4)) > 0.5
    decoded = decode_volume(encode_volume(support))
    assert decoded.dtype == np.float32
    np.testing.assert_array_equal(decoded, support.astype(np.float32))


def test_cdiv_rejects_malformed_input(rng):
    """Test every reader rejection: magic, version, dtype, length."""
    data = bytearray(encode_volume(rng.random((2, 2, 2)).astype(np.float32)))

    bad_magic = b"XDIV" + bytes(data[4:])
    bad_version = bytes(data[:4]) + b"\x02" + bytes(data[5:])
    bad_dtype = bytes(data[:5]) + b"\x07" + bytes(data[6:])
    truncated = bytes(data[:-4])
    for blob in (bad_magic, bad_version, bad_dtype, truncated, b"CDIV"):
        with pytest.raises(FormatError):
            decode_volume(blob)


def test_cdiv_refuses_non_finite_and_non_3d():
    vol = np.zeros((2, 2, 2), dtype=np.float32)
    vol[1, 1, 1] = np.nan
    with pytest.raises(VolumeError):
        encode_volume(vol)
    with pytest.raises(VolumeError):
        encode_volume(np.zeros((4, 4)))


def test_volume_files(tmp_path, rng):
    """Test write/read through nested directories, and path-prefixed errors."""
    vol = rng.random((4, 4, 4)).astype(np.float32)
    path = tmp_path / "a" / "b" / "vol.cdiv"
    write_volume(path, vol)
    np.testing.assert_array_equal(read_volume(path), vol)

    broken = tmp_path / "broken.cdiv"
    broken.write_bytes(b"nope")
    with pytest.raises(FormatError, match="broken.cdiv"):
        read_volume(broken)


def test_weights_round_trip(tiny_network_config):
    """Test CDNW encode/decode preserves config and every tensor."""
    network = CdiNetwork(tiny_network_config, seed=3)
    tensors = network.get_weights()
    config, decoded = decode_weights(encode_weights(tiny_network_config, tensors))

    assert config == tiny_network_config
    assert len(decoded) == len(parameter_plan(tiny_network_config))
    for a, b in zip(tensors, decoded, strict=True):
        np.testing.assert_array_equal(a, b)


def test_weights_layout(tiny_network_config):
    network = CdiNetwork(tiny_network_config, seed=3)
    data = encode_weights(tiny_network_config, network.get_weights())
    magic, version, header_len = struct.unpack_from("<4sBI", data)
    assert magic == b"CDNW"
    assert version == 1
    header = json.loads(data[9 : 9 + header_len])
    assert header["encoder_channels"] == [2, 4]
    n_params = sum(int(np.prod(shape)) for _, shape in parameter_plan(tiny_network_config))
    assert len(data) == 9 + header_len + 4 * n_params


def test_weights_size_checks(tiny_network_config):
    """Test that tensor count, shape and payload size are checked."""
    tensors = CdiNetwork(tiny_network_config).get_weights()
    with pytest.raises(FormatError):
        encode_weights(tiny_network_config, tensors[:-1])
    with pytest.raises(FormatError):
        encode_weights(tiny_network_config, [tensors[1], tensors[0], *tensors[2:]])
    data = encode_weights(tiny_network_config, tensors)
    with pytest.raises(FormatError):
        decode_weights(data[:-4])
    with pytest.raises(FormatError):
        decode_weights(b"CDNX" + data[4:])


def test_network_save_load(tmp_path, tiny_network_config, rng):
    network = CdiNetwork(tiny_network_config, seed=5)
    path = tmp_path / "weights.cdnw"
    save_network(path, network)
    loaded = load_network(path)

    m = rng.random((16, 16, 16)).astype(np.float32)[None]
    network.evaluate()
    loaded.evaluate()
    for a, b in zip(network.forward(m), loaded.forward(m), strict=True):
        np.testing.assert_array_equal(a, b)


def test_manifest_byte_stability(dataset_dir):
    """Test manifest write -> read -> write gives identical bytes."""
    store = DatasetStore(dataset_dir)
    manifest = store.read_manifest()
    assert manifest_bytes(manifest) == store.manifest_path.read_bytes()
    assert store.manifest_path.read_bytes().endswith(b"}\n")


def test_store_reads_samples_and_validates(dataset_dir):
    store = DatasetStore(dataset_dir)
    manifest = store.read_manifest()
    pairs = list(store.samples("test"))
    assert len(pairs) == manifest.counts.test
    record, sample = pairs[0]
    assert record.split == "test"
    assert sample.magnitude.shape == tuple(manifest.dims)
    assert store.validate() == []


def test_store_validate_reports_problems(dataset_dir):
    """Test that missing and corrupt volumes are reported, not raised."""
    store = DatasetStore(dataset_dir)
    records = store.read_manifest().samples
    (dataset_dir / records[0].shape_path).unlink()
    (dataset_dir / records[1].phase_path).write_bytes(b"garbage")

    problems = store.validate()
    assert len(problems) == 2
    assert records[0].id in problems[0]
    assert "missing" in problems[0]


def test_store_missing_manifest(tmp_path):
    with pytest.raises(FormatError, match="no manifest"):
        DatasetStore(tmp_path).read_manifest()


def test_load_json_reports_line(tmp_path):
    """Test that JSON parse errors name the line."""
    path = tmp_path / "bad.json"
    path.write_text('{\n  "seed": 1,\n  "threads": ,\n}\n', encoding="utf-8")
    with pytest.raises(FormatError, match="line 3"):
        load_json(path)

    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(FormatError, match="JSON object"):
        load_json(path)


def test_report_files(tmp_path):
    """Test the CSV row table, series trace and JSON writers."""
    rows = [
        BenchmarkRow(
            sample_id="s000001",
            method="nn",
            shape_mae=0.1,
            phase_mae=0.2,
            chi2=0.01,
            twin_used=True,
            wall_ms=3.5,
        )
    ]
    write_rows_csv(tmp_path / "rows.csv", rows)
    assert (tmp_path / "rows.csv").read_text().splitlines()[0] == (
        "sample_id,method,shape_mae,phase_mae,chi2,twin_used,wall_ms"
    )
    assert read_rows_csv(tmp_path / "rows.csv") == rows

    write_series_csv(tmp_path / "trace.csv", "chi2", [0.5, 0.25])
    assert (tmp_path / "trace.csv").read_text().splitlines() == [
        "iteration,chi2",
        "0,0.5",
        "1,0.25",
    ]

    write_json(tmp_path / "doc.json", {"a": 1})
    assert (tmp_path / "doc.json").read_text() == '{\n  "a": 1\n}\n'
