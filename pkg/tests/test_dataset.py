"""Dataset building, splitting and experimental-data ingestion."""

import numpy as np
import pytest

from cdiforge.dal import DatasetStore
from cdiforge.errors import ConfigError, VolumeError
from cdiforge.dataset import build_dataset, centroid_crop, ingest_experimental, pad_even, plan_split


def test_plan_split_counts():
    """Test the test-split size, including a full-scale dataset."""
    assert plan_split(107180, 7180 / 107180, 3).sum() == 7180
    assert plan_split(10, 0.0, 3).sum() == 0
    assert plan_split(10, 0.25, 3).sum() == 2
    np.testing.assert_array_equal(plan_split(50, 0.2, 9), plan_split(50, 0.2, 9))
    assert not np.array_equal(plan_split(50, 0.2, 9), plan_split(50, 0.2, 10))
    with pytest.raises(ConfigError):
        plan_split(10, 1.0, 0)


def test_paired_samples(dataset_dir):
    """Test that each strain-free sample copies its partner's geometry and split."""
    store = DatasetStore(dataset_dir)
    manifest = store.read_manifest()
    assert len(manifest.samples) == 8
    assert manifest.counts.test == 2
    assert manifest.dims == (16, 16, 16)

    records = {r.id: r for r in manifest.samples}
    for index in range(4):
        strained = records[f"s{index:06d}"]
        control = records[f"u{index:06d}"]
        assert strained.include_strain
        assert not control.include_strain
        assert strained.seed == control.seed
        assert strained.split == control.split
        assert strained.n_planes == control.n_planes

        a = store.read_sample(strained)
        b = store.read_sample(control)
        np.testing.assert_array_equal(a.shape, b.shape)
        assert not b.phase.any()
        assert a.phase.any()


def test_splits_are_disjoint(dataset_dir):
    manifest = DatasetStore(dataset_dir).read_manifest()
    train = {r.seed for r in manifest.samples if r.split == "train"}
    test = {r.seed for r in manifest.samples if r.split == "test"}
    assert train
    assert test
    assert not train & test


def test_build_is_deterministic(tmp_path, small_generator):
    """Test byte-identical output for the same seed, regardless of thread count."""
    build_dataset(2, 2, 0.5, 21, tmp_path / "a", small_generator)
    build_dataset(2, 2, 0.5, 21, tmp_path / "b", small_generator, threads=2)

    files_a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.*"))
    files_b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*.*"))
    assert files_a == files_b
    assert len(files_a) == 1 + 4 * 3
    for rel in files_a:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


def test_unequal_counts(tmp_path, small_generator):
    manifest = build_dataset(3, 1, 0.0, 5, tmp_path / "data", small_generator)
    ids = [r.id for r in manifest.samples]
    assert ids == ["s000000", "u000000", "s000001", "s000002"]
    assert manifest.counts.train == 4
    assert manifest.counts.test == 0
    with pytest.raises(ConfigError):
        build_dataset(0, 1, 0.0, 5, tmp_path / "empty", small_generator)


def test_pad_even():
    vol = np.ones((3, 4, 5))
    padded = pad_even(vol)
    assert padded.shape == (4, 4, 6)
    assert padded[:3, :, :5].all()
    assert not padded[3].any()
    assert pad_even(np.ones((2, 2, 2))).shape == (2, 2, 2)


def test_centroid_crop_clips_at_edges():
    vol = np.zeros((40, 32, 36))
    vol[30, 10, 5] = 1.0
    crop = centroid_crop(vol)
    assert crop.shape == (32, 32, 32)
    assert crop[22, 10, 5] == 1.0


def test_centroid_crop_centres_the_intensity():
    vol = np.zeros((40, 32, 36))
    vol[19:21, 15:17, 17:19] = 1.0
    crop = centroid_crop(vol)
    assert crop.shape == (32, 32, 32)
    assert crop[15:17, 15:17, 15:17].all()
    assert crop.sum() == vol.sum()


def cosine_volume(n):
    """Positive, band-limited test magnitude sampled at voxel centres."""
    g = (np.arange(n) + 0.5) / n
    x, y, z = np.meshgrid(g, g, g, indexing="ij")
    return 2.0 + np.cos(np.pi * x) * np.cos(2 * np.pi * y) + 0.5 * np.cos(3 * np.pi * z)


def test_ingest_band_limited_volume():
    """Test that a band-limited magnitude lands on the smaller grid unchanged, up to scale."""
    out = ingest_experimental(cosine_volume(32), (16, 16, 16))
    expected = cosine_volume(16)
    assert out.dtype == np.float32
    assert out.max() == pytest.approx(1.0)
    np.testing.assert_allclose(out, expected / expected.max(), atol=1e-5)


def test_ingest_odd_and_negative_input(rng):
    vol = rng.random((17, 21, 19)) - 0.1
    out = ingest_experimental(vol, (8, 8, 8))
    assert out.shape == (8, 8, 8)
    assert out.min() >= 0
    assert out.max() == pytest.approx(1.0)


def test_ingest_rejections():
    with pytest.raises(VolumeError):
        ingest_experimental(np.ones((4, 4)), (2, 2, 2))
    with pytest.raises(VolumeError):
        ingest_experimental(np.zeros((8, 8, 8)), (4, 4, 4))
    with pytest.raises(VolumeError):
        ingest_experimental(-np.ones((8, 8, 8)), (4, 4, 4))
    with pytest.raises(VolumeError):
        ingest_experimental(np.ones((8, 8, 12)), (10, 8, 8))
    bad = np.ones((8, 8, 8))
    bad[0, 0, 0] = np.inf
    with pytest.raises(VolumeError):
        ingest_experimental(bad, (4, 4, 4))
