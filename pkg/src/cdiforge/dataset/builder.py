"""Dataset materialization: paired strained / strain-free samples and the manifest."""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from cdiforge.crystalgen import derive_sample_seed, generate_spec, make_sample
from cdiforge.crystalgen.sample import TrainingSample
from cdiforge.dal import DatasetStore
from cdiforge.errors import ConfigError
from cdiforge.models import (
    CrystalSpec,
    DatasetManifest,
    ForwardConfig,
    GeneratorConfig,
    SampleRecord,
    SplitCounts,
)

logger = logging.getLogger(__name__)

# Separates the split permutation from every per-sample stream.
_SPLIT_STREAM = 0x5911

# (geometry seed, recipe, strained sample, strain-free sample)
Pair = tuple[int, CrystalSpec, TrainingSample | None, TrainingSample | None]


def plan_split(n_geometries: int, split_fraction: float, seed: int) -> np.ndarray:
    """Boolean mask over geometry indices, True where the geometry goes to the test split."""
    if not 0 <= split_fraction < 1:
        raise ConfigError(f"split_fraction must be in [0, 1), got {split_fraction}")
    rng = np.random.default_rng((seed, _SPLIT_STREAM))
    n_test = int(round(split_fraction * n_geometries))
    is_test = np.zeros(n_geometries, dtype=bool)
    is_test[rng.permutation(n_geometries)[:n_test]] = True
    return is_test


def _generate_pair(
    index: int,
    dataset_seed: int,
    config: GeneratorConfig,
    forward: ForwardConfig,
    strained: bool,
    unstrained: bool,
) -> Pair:
    geometry_seed = derive_sample_seed(dataset_seed, index)
    spec = generate_spec(geometry_seed, config.model_copy(update={"include_strain": True}))
    with_strain = without = None
    if strained:
        with_strain = make_sample(spec, config.grid, config.bragg, forward, config.subsamples)
    if unstrained:
        control = spec.model_copy(update={"include_strain": False})
        without = make_sample(control, config.grid, config.bragg, forward, config.subsamples)
    return geometry_seed, spec, with_strain, without


def build_dataset(
    n_strained: int,
    n_unstrained: int,
    split_fraction: float,
    seed: int,
    out_dir: Path,
    config: GeneratorConfig | None = None,
    forward: ForwardConfig | None = None,
    threads: int = 1,
) -> DatasetManifest:
    """Generate, write and manifest a dataset.

    Both counts are totals over train and test. Strain-free samples reuse the
    geometry of the strained sample with the same index, and the split is made
    over geometries, so a geometry seed never lands in both splits.

    Raises:
        ConfigError: if a count is below 1.
        GenerationError: if a crystal cannot be drawn.
    """
    if n_strained < 1 or n_unstrained < 1:
        raise ConfigError(f"sample counts must be >= 1, got {n_strained} and {n_unstrained}")
    config = config or GeneratorConfig()
    forward = forward or ForwardConfig()
    n_geometries = max(n_strained, n_unstrained)
    is_test = plan_split(n_geometries, split_fraction, seed)
    store = DatasetStore(out_dir)

    def work(index: int) -> Pair:
        return _generate_pair(
            index, seed, config, forward, index < n_strained, index < n_unstrained
        )

    records: list[SampleRecord] = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for index, (geometry_seed, spec, strained, control) in enumerate(
            pool.map(work, range(n_geometries))
        ):
            split = "test" if is_test[index] else "train"
            for prefix, sample in (("s", strained), ("u", control)):
                if sample is None:
                    continue
                sample_id = f"{prefix}{index:06d}"
                shape_path, phase_path, magnitude_path = store.write_sample(sample_id, sample)
                records.append(
                    SampleRecord(
                        id=sample_id,
                        split=split,
                        seed=geometry_seed,
                        include_strain=prefix == "s",
                        n_planes=spec.n_planes,
                        strain=spec.affine_strain,
                        shape_path=shape_path,
                        phase_path=phase_path,
                        magnitude_path=magnitude_path,
                    )
                )
            if (index + 1) % 100 == 0:
                logger.info("generated %d of %d geometries", index + 1, n_geometries)

    manifest = DatasetManifest(
        dataset_seed=seed,
        dims=config.grid.dims,
        voxel_pitch=config.grid.voxel_pitch,
        normalization="max" if forward.normalize else "none",
        bragg_vector=config.bragg.g,
        counts=SplitCounts(
            train=sum(r.split == "train" for r in records),
            test=sum(r.split == "test" for r in records),
        ),
        samples=records,
    )
    store.write_manifest(manifest)
    logger.info(
        "dataset at %s: %d train, %d test", out_dir, manifest.counts.train, manifest.counts.test
    )
    return manifest
