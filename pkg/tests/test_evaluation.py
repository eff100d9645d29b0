"""Ambiguity-aware errors, strain maps, summaries and the benchmark."""

import itertools
import math
import sys

import numpy as np
import pytest
from threadpoolctl import threadpool_info

from cdiforge.errors import BenchmarkError, VolumeError
from cdiforge.evaluation import (
    benchmark,
    conjugate_twin,
    evaluate_network,
    gauge_fix,
    phase_difference,
    quartiles,
    recon_error,
    reflect,
    register,
    split_object,
    strain_map,
    summarize,
    to_row,
    twin_parts,
)
from cdiforge.models import BenchmarkRow, BraggVector, PRConfig, ReconError, RefineConfig
from cdiforge.nn import CdiNetwork
from cdiforge.volume import fft3_centered, recombine


def test_reflect_and_twin(rng):
    """Test the point reflection and that the twin keeps the diffraction magnitude."""
    vol = rng.standard_normal((4, 6, 8))
    assert reflect(vol)[1, 2, 3] == vol[3, 4, 5]
    assert reflect(vol)[0, 0, 0] == vol[0, 0, 0]
    np.testing.assert_array_equal(reflect(reflect(vol)), vol)

    rho = rng.standard_normal((8, 8, 8)) + 1j * rng.standard_normal((8, 8, 8))
    twin = conjugate_twin(rho)
    np.testing.assert_allclose(conjugate_twin(twin), rho)
    np.testing.assert_allclose(np.abs(fft3_centered(twin)), np.abs(fft3_centered(rho)), atol=1e-9)
    with pytest.raises(VolumeError):
        conjugate_twin(np.ones((3, 4, 4), dtype=np.complex64))


def test_twin_parts_match_complex_twin(sample):
    shape, phase = twin_parts(sample.shape, sample.phase)
    np.testing.assert_allclose(
        recombine(shape, phase), conjugate_twin(recombine(sample.shape, sample.phase)), atol=1e-6
    )
    assert phase.dtype == np.float32


def test_centrosymmetric_real_object_is_its_own_twin():
    vol = np.zeros((8, 8, 8))
    vol[3:6, 3:6, 3:6] = 1.0  # symmetric about voxel 4
    shape, phase = twin_parts(vol, np.zeros_like(vol))
    np.testing.assert_array_equal(shape, vol)
    assert not phase.any()


def test_register_recovers_a_shift(rng):
    target = rng.random((8, 8, 8))
    pred = np.roll(target, (3, 0, 0), axis=(0, 1, 2))
    shifted, shift = register(pred, target)
    assert shift == (-3, 0, 0)
    np.testing.assert_allclose(shifted, target)

    half = np.roll(target, (4, -2, 1), axis=(0, 1, 2))
    assert register(half, target)[1] == (-4, 2, -1)


def test_register_matches_brute_force(rng):
    """Test the FFT correlation peak against every cyclic shift."""
    target = rng.random((8, 8, 8))
    pred = rng.random((8, 8, 8))
    _, shift = register(pred, target)

    scores = {
        s: float(np.sum(target * np.roll(pred, s, axis=(0, 1, 2))))
        for s in itertools.product(range(-4, 4), repeat=3)
    }
    best = max(scores.values())
    assert scores[shift] == pytest.approx(best, rel=1e-12)


def test_register_ties_prefer_no_shift():
    flat = np.ones((4, 4, 4))
    shifted, shift = register(flat, flat)
    assert shift == (0, 0, 0)
    np.testing.assert_array_equal(shifted, flat)


def test_gauge_fix(rng):
    """Test that a global offset is removed and the weighted mean phase is zero."""
    phase = rng.uniform(-0.5, 0.5, (8, 8, 8))
    weights = rng.random((8, 8, 8))
    fixed = gauge_fix(phase, weights)
    assert abs(np.angle(np.sum(weights * np.exp(1j * fixed)))) < 1e-12

    offset = gauge_fix(np.angle(np.exp(1j * (phase + 2.5))), weights)
    np.testing.assert_allclose(offset, fixed, atol=1e-12)

    with pytest.raises(VolumeError):
        gauge_fix(phase, np.zeros_like(weights))
    with pytest.raises(VolumeError):
        gauge_fix(phase, weights - 0.5)


def test_phase_difference_wraps():
    a = np.full((2, 2, 2), 3.1)
    b = np.full((2, 2, 2), -3.1)
    assert phase_difference(a, b, np.ones((2, 2, 2))) == pytest.approx(2 * math.pi - 6.2)
    assert phase_difference(a, a + math.pi, np.ones((2, 2, 2))) <= math.pi


def test_perfect_prediction(sample):
    error = recon_error(sample.shape, sample.phase, sample.shape, sample.phase, chi2=0.0)
    assert isinstance(error, ReconError)
    assert error.shape_mae == 0.0
    assert error.phase_mae < 1e-6
    assert not error.twin_used
    assert error.shift_used == (0, 0, 0)
    assert error.chi2 == 0.0


def test_twin_prediction_scores_as_correct(sample):
    """Test that predicting the conjugate twin is not penalized."""
    shape, phase = twin_parts(sample.shape, sample.phase)
    error = recon_error(shape, phase, sample.shape, sample.phase)
    assert error.twin_used
    assert error.shape_mae < 1e-6
    assert error.phase_mae < 1e-5


def test_shift_and_offset_are_ignored(sample):
    shape = np.roll(sample.shape, (2, -1, 3), axis=(0, 1, 2))
    phase = np.roll(sample.phase, (2, -1, 3), axis=(0, 1, 2)) + np.float32(1.0)
    error = recon_error(shape, phase, sample.shape, sample.phase)
    assert not error.twin_used
    assert error.shift_used == (-2, 1, -3)
    assert error.shape_mae < 1e-6
    assert error.phase_mae < 1e-5


def test_error_is_twin_invariant(sample, rng):
    """Test that a prediction and its twin get the same score."""
    shape = np.clip(sample.shape + rng.normal(0, 0.05, sample.shape.shape), 0, 1)
    phase = sample.phase + rng.normal(0, 0.2, sample.phase.shape)
    direct = recon_error(shape, phase, sample.shape, sample.phase)
    twin = recon_error(*twin_parts(shape, phase), sample.shape, sample.phase)
    assert direct.shape_mae == pytest.approx(twin.shape_mae, rel=1e-9)
    assert direct.phase_mae == pytest.approx(twin.phase_mae, rel=1e-6)
    assert direct.twin_used != twin.twin_used
    assert 0 <= direct.phase_mae <= math.pi


def test_recon_error_checks_dims(sample):
    with pytest.raises(VolumeError):
        recon_error(sample.shape[:8], sample.phase, sample.shape, sample.phase)
    with pytest.raises(VolumeError):
        recon_error(sample.shape, sample.phase, np.zeros_like(sample.shape), sample.phase)


def test_split_object():
    rho = np.zeros((4, 4, 4), dtype=np.complex64)
    rho[1, 1, 1] = 2j
    rho[2, 2, 2] = -1.0
    shape, phase = split_object(rho)
    assert shape.dtype == np.float32
    assert shape[1, 1, 1] == 1.0
    assert shape[2, 2, 2] == 0.5
    assert phase[1, 1, 1] == pytest.approx(math.pi / 2)
    with pytest.raises(VolumeError):
        split_object(np.zeros((4, 4, 4), dtype=np.complex64))


def test_strain_map_uniform_strain():
    """Test a uniform 1% strain along the default Bragg vector."""
    n = 12
    x, y, z = np.meshgrid(*(np.arange(n),) * 3, indexing="ij")
    phase = 0.01 * 2 * math.pi * (x + y + z)
    support = np.zeros((n, n, n), dtype=bool)
    support[3:9, 2:10, 4:8] = True

    strain = strain_map(phase, support)
    np.testing.assert_allclose(strain[support], 0.01, atol=1e-12)
    assert not strain[~support].any()

    halved = strain_map(phase, support, pitch=2.0)
    np.testing.assert_allclose(halved[support], 0.005, atol=1e-12)


def test_strain_map_survives_phase_wraps():
    n = 8
    x = np.arange(n)[:, None, None] * np.ones((n, n, n))
    phase = np.angle(np.exp(1j * 1.5 * x))
    strain = strain_map(phase, np.ones((n, n, n), dtype=bool), BraggVector(g=(1.0, 0.0, 0.0)))
    # the first and last slices pair up across the periodic boundary
    np.testing.assert_allclose(strain[1:-1], 1.5, atol=1e-12)


def make_row(method, shape_mae, twin=False, wall_ms=1.0, chi2=0.1):
    return BenchmarkRow(
        sample_id="s000000",
        method=method,
        shape_mae=shape_mae,
        phase_mae=0.1,
        chi2=chi2,
        twin_used=twin,
        wall_ms=wall_ms,
    )


def test_summarize():
    rows = [
        make_row("retrieval", 0.4, wall_ms=100.0),
        make_row("nn", 0.1, twin=True),
        make_row("nn", 0.2),
        make_row("nn", 0.3),
        make_row("nn", 0.4, twin=True),
    ]
    summary = summarize(rows)
    assert [s.method for s in summary] == ["retrieval", "nn"]
    nn = summary[1]
    assert nn.count == 4
    assert nn.twin_rate == 0.5
    assert nn.shape_mae.median == pytest.approx(0.25)
    assert nn.shape_mae.q1 == pytest.approx(0.175)
    assert nn.shape_mae.q3 == pytest.approx(0.325)
    assert summary[0].wall_ms.median == 100.0
    assert quartiles([1.0]).q1 == 1.0


def test_to_row_missing_chi2():
    error = ReconError(shape_mae=0.1, phase_mae=0.2)
    row = to_row("u000003", "nn", error, 2.0)
    assert math.isnan(row.chi2)
    assert row.sample_id == "u000003"


def test_evaluate_network(tiny_network_config, sample, unstrained_sample):
    network = CdiNetwork(tiny_network_config, seed=1)
    rows = evaluate_network([("s1", sample), ("u1", unstrained_sample)], network)
    assert [r.sample_id for r in rows] == ["s1", "u1"]
    assert all(r.method == "nn" for r in rows)
    assert all(math.isfinite(r.chi2) for r in rows)
    assert all(0 <= r.phase_mae <= math.pi for r in rows)


def test_benchmark_refuses_bad_input(tiny_network_config, sample):
    with pytest.raises(BenchmarkError, match="weights"):
        benchmark([("s1", sample)], None)
    with pytest.raises(BenchmarkError, match="sample"):
        benchmark([], CdiNetwork(tiny_network_config))


def test_benchmark_times_on_one_native_thread(monkeypatch, tiny_network_config, sample):
    """Test that BLAS and OpenMP pools are held to one thread while timing."""
    seen = []

    def fake_sample(sample_id, *args):
        seen.extend(pool["num_threads"] for pool in threadpool_info())
        error = ReconError(shape_mae=0.1, phase_mae=0.2, chi2=0.01)
        return [
            to_row(sample_id, "nn", error, 1.0),
            to_row(sample_id, "nn_refine", error, 5.0),
            to_row(sample_id, "retrieval", error, 50.0),
        ]

    monkeypatch.setattr(sys.modules["cdiforge.evaluation.benchmark"], "benchmark_sample", fake_sample)
    report = benchmark([("s1", sample), ("s2", sample)], CdiNetwork(tiny_network_config))
    assert all(n == 1 for n in seen)
    assert report.retrieval_over_nn == pytest.approx(50.0)
    assert report.retrieval_over_nn_refine == pytest.approx(10.0)


@pytest.mark.slow
def test_benchmark_report(tiny_network_config, sample):
    """Test three rows per sample, the summary, and the speed ordering."""
    network = CdiNetwork(tiny_network_config, seed=1)
    report = benchmark(
        [("s1", sample)],
        network,
        PRConfig(),
        RefineConfig(iterations=10),
        seed=3,
    )
    assert [r.method for r in report.rows] == ["nn", "nn_refine", "retrieval"]
    assert [s.method for s in report.summary] == ["nn", "nn_refine", "retrieval"]
    assert report.rows[1].wall_ms >= report.rows[0].wall_ms
    assert report.retrieval_over_nn > 1.0
    assert all(math.isfinite(r.chi2) for r in report.rows)
