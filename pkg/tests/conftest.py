"""Pytest configuration and fixtures."""

import json

import numpy as np
import pytest

from cdiforge.crystalgen import generate_spec, make_sample
from cdiforge.dataset import build_dataset
from cdiforge.models import GeneratorConfig, GridSpec, NetworkConfig, PRConfig


@pytest.fixture
def rng():
    """Seeded generator so every test draws the same numbers."""
    return np.random.default_rng(20240611)


@pytest.fixture
def small_grid():
    """16^3 grid, pitch 2: a crystal block of voxels 5..11."""
    return GridSpec(dims=(16, 16, 16), voxel_pitch=2.0)


@pytest.fixture
def small_generator(small_grid):
    """Generator settings that fit a crystal in the 16^3 grid quickly."""
    return GeneratorConfig(grid=small_grid, box_padding=1.0, subsamples=2)


@pytest.fixture
def sample(small_generator):
    """One strained 16^3 training triple."""
    spec = generate_spec(7, small_generator)
    return make_sample(spec, small_generator.grid, subsamples=small_generator.subsamples)


@pytest.fixture
def unstrained_sample(small_generator):
    spec = generate_spec(7, small_generator.model_copy(update={"include_strain": False}))
    return make_sample(spec, small_generator.grid, subsamples=small_generator.subsamples)


@pytest.fixture
def tiny_network_config():
    """Two-stage network for 16^3 inputs: widths 2, 4 then 2, 1."""
    return NetworkConfig(input_dim=16, encoder_channels=[2, 4], kernel=3, dropout_rate=0.1)


@pytest.fixture
def short_retrieval():
    """A 60-iteration schedule for quick retrieval runs."""
    return PRConfig(total_iters=60, shrinkwrap_interval=20, average_last=10, restarts=2)


@pytest.fixture
def dataset_dir(tmp_path, small_generator):
    """Four paired geometries, one held out for testing."""
    out = tmp_path / "data"
    build_dataset(4, 4, 0.25, 11, out, small_generator)
    return out


@pytest.fixture
def run_config_file(tmp_path):
    """RunConfig JSON sized for command-line tests."""
    path = tmp_path / "run.json"
    config = {
        "generator": {
            "grid": {"dims": [16, 16, 16], "voxel_pitch": 2.0},
            "box_padding": 1.0,
            "subsamples": 2,
        },
        "network": {"input_dim": 16, "encoder_channels": [2, 4], "dropout_rate": 0.1},
        "training": {"stage_epochs": [1, 1, 1, 1], "batch_size": 2},
        "refinement": {"iterations": 20},
        "evaluation": {"benchmark_samples": 1},
    }
    path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return path
