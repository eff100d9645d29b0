"""Forward model tests."""

import numpy as np
import pytest

from cdiforge.errors import VolumeError
from cdiforge.evaluation import twin_parts
from cdiforge.forward import oversampling_ratio, simulate_diffraction
from cdiforge.models import ForwardConfig


def test_normalized_peak(sample):
    m = simulate_diffraction(sample.shape, sample.phase)
    assert m.dtype == np.float32
    assert m.max() == pytest.approx(1.0)
    assert m.min() >= 0


def test_friedel_symmetry(unstrained_sample):
    """Test |F(q)| = |F(-q)| for a real object on the centred grid."""
    m = simulate_diffraction(unstrained_sample.shape, unstrained_sample.phase)
    mirrored = np.roll(np.flip(m), 1, axis=(0, 1, 2))
    np.testing.assert_allclose(m, mirrored, atol=1e-5)


def test_strain_breaks_friedel_symmetry(sample):
    m = simulate_diffraction(sample.shape, sample.phase).astype(np.float64)
    mirrored = np.roll(np.flip(m), 1, axis=(0, 1, 2))
    assert np.max(np.abs(m - mirrored)) > 1e-3


def test_unnormalized_parseval(sample):
    """Test that raw magnitudes keep the energy of the object."""
    shape = sample.shape.astype(np.float64)
    m = simulate_diffraction(shape, sample.phase.astype(np.float64), ForwardConfig(normalize=False))
    assert m.dtype == np.float64
    assert np.sum(m**2) == pytest.approx(m.size * np.sum(shape**2), rel=1e-9)


def test_dc_term_of_real_object(unstrained_sample):
    shape = unstrained_sample.shape.astype(np.float64)
    m = simulate_diffraction(shape, np.zeros_like(shape), ForwardConfig(normalize=False))
    assert m[8, 8, 8] == pytest.approx(shape.sum())
    assert m[8, 8, 8] == pytest.approx(m.max())


def test_rejects_bad_input():
    """Test zero shapes, odd dims and mismatched phase."""
    with pytest.raises(VolumeError):
        simulate_diffraction(np.zeros((8, 8, 8)), np.zeros((8, 8, 8)))
    with pytest.raises(VolumeError):
        simulate_diffraction(np.ones((7, 8, 8)), np.zeros((7, 8, 8)))
    with pytest.raises(VolumeError):
        simulate_diffraction(np.ones((8, 8, 8)), np.zeros((4, 8, 8)))


def test_oversampling_ratio(sample):
    box = np.zeros((16, 16, 16))
    box[6:10, 5:13, 4:12] = 1.0
    assert oversampling_ratio(box) == (4.0, 2.0, 2.0)
    assert min(oversampling_ratio(sample.shape)) >= 2.0
    with pytest.raises(VolumeError):
        oversampling_ratio(np.full((4, 4, 4), 0.05))


@pytest.mark.parametrize("shift", [(1, 0, 0), (3, -2, 5), (-8, 7, 1)])
def test_magnitude_ignores_cyclic_shifts(sample, shift):
    m = simulate_diffraction(sample.shape, sample.phase)
    rolled = simulate_diffraction(
        np.roll(sample.shape, shift, axis=(0, 1, 2)),
        np.roll(sample.phase, shift, axis=(0, 1, 2)),
    )
    np.testing.assert_allclose(rolled, m, atol=1e-6)


def test_magnitude_ignores_the_twin(sample):
    """Test that the conjugate of the point-reflected object diffracts identically."""
    m = simulate_diffraction(sample.shape, sample.phase)
    twin = simulate_diffraction(*twin_parts(sample.shape, sample.phase))
    np.testing.assert_allclose(twin, m, atol=1e-6)
