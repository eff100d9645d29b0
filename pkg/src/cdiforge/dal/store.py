"""Dataset directory store - all dataset file access goes through here."""

import json
import logging
from collections.abc import Iterator
from pathlib import Path

from pydantic import ValidationError

from cdiforge.config import Config
from cdiforge.crystalgen.sample import TrainingSample
from cdiforge.dal.volume_codec import read_volume, write_volume
from cdiforge.errors import FormatError
from cdiforge.models import DatasetManifest, SampleRecord

logger = logging.getLogger(__name__)

SAMPLES_DIR = "samples"


class DatasetStore:
    """Data access layer for one dataset directory.

    Dataset builders and trainers must NOT touch the directory directly.

    Layout:
    - manifest.json: the DatasetManifest, 2-space indented, trailing newline
    - samples/<id>_{shape,phase,magnitude}.cdiv: one CDIV file per volume
    """

    def __init__(self, root: Path) -> None:
        self.root = root

    @property
    def manifest_path(self) -> Path:
        return self.root / Config.MANIFEST_NAME

    # Sample operations
    def sample_paths(self, sample_id: str) -> tuple[str, str, str]:
        """Relative (shape, phase, magnitude) paths for a sample id."""
        return (
            f"{SAMPLES_DIR}/{sample_id}_shape.cdiv",
            f"{SAMPLES_DIR}/{sample_id}_phase.cdiv",
            f"{SAMPLES_DIR}/{sample_id}_magnitude.cdiv",
        )

    def write_sample(self, sample_id: str, sample: TrainingSample) -> tuple[str, str, str]:
        """Write the three volumes of a sample and return their relative paths."""
        paths = self.sample_paths(sample_id)
        for rel, vol in zip(paths, (sample.shape, sample.phase, sample.magnitude), strict=True):
            write_volume(self.root / rel, vol)
        return paths

    def read_sample(self, record: SampleRecord) -> TrainingSample:
        """Load the volumes referenced by a manifest record."""
        return TrainingSample(
            shape=read_volume(self.root / record.shape_path),
            phase=read_volume(self.root / record.phase_path),
            magnitude=read_volume(self.root / record.magnitude_path),
        )

    def samples(self, split: str | None = None) -> Iterator[tuple[SampleRecord, TrainingSample]]:
        """Iterate over (record, sample) pairs in manifest order, optionally for one split."""
        manifest = self.read_manifest()
        for record in manifest.samples:
            if split is None or record.split == split:
                yield record, self.read_sample(record)

    # Manifest operations
    def write_manifest(self, manifest: DatasetManifest) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path.write_bytes(manifest_bytes(manifest))

    def read_manifest(self) -> DatasetManifest:
        try:
            text = self.manifest_path.read_text(encoding="utf-8")
        except FileNotFoundError as e:
            raise FormatError(f"no manifest at {self.manifest_path}") from e
        try:
            return DatasetManifest.model_validate_json(text)
        except ValidationError as e:
            raise FormatError(f"invalid manifest {self.manifest_path}: {e}") from e

    def validate(self) -> list[str]:
        """Check that every referenced volume exists, parses, and has the manifest dims.

        Returns:
            Problems found, empty when the dataset is consistent.
        """
        manifest = self.read_manifest()
        problems: list[str] = []
        for record in manifest.samples:
            for rel in (record.shape_path, record.phase_path, record.magnitude_path):
                path = self.root / rel
                if not path.exists():
                    problems.append(f"{record.id}: missing {rel}")
                    continue
                try:
                    vol = read_volume(path)
                except FormatError as e:
                    problems.append(f"{record.id}: {e}")
                    continue
                if vol.shape != tuple(manifest.dims):
                    problems.append(f"{record.id}: {rel} has dims {vol.shape}, not {manifest.dims}")
        logger.info("validated %d samples, %d problems", len(manifest.samples), len(problems))
        return problems


def manifest_bytes(manifest: DatasetManifest) -> bytes:
    """Exact bytes ``write_manifest`` produces, for byte-stability checks."""
    return (manifest.model_dump_json(indent=2) + "\n").encode("utf-8")


def load_json(path: Path) -> dict:
    """Read a UTF-8 JSON document, reporting the failing line on parse errors."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top level must be a JSON object")
    return data
