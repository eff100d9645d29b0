"""Report files: CSV tables, traces and JSON documents written next to run outputs."""

import csv
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from cdiforge.models import BenchmarkRow

ROW_COLUMNS = ("sample_id", "method", "shape_mae", "phase_mae", "chi2", "twin_used", "wall_ms")


def _open_for_write(path: Path) -> Any:
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w", encoding="utf-8", newline="")


def write_rows_csv(path: Path, rows: Iterable[BenchmarkRow]) -> None:
    """One line per (sample, method) with the error and timing columns."""
    with _open_for_write(path) as f:
        writer = csv.DictWriter(f, fieldnames=ROW_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row.model_dump())


def read_rows_csv(path: Path) -> list[BenchmarkRow]:
    with path.open(encoding="utf-8", newline="") as f:
        return [BenchmarkRow.model_validate(line) for line in csv.DictReader(f)]


def write_series_csv(path: Path, column: str, values: Sequence[float]) -> None:
    """Two-column trace ``iteration,<column>``, iterations counted from 0."""
    with _open_for_write(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("iteration", column))
        for k, value in enumerate(values):
            writer.writerow((k, repr(float(value))))


def write_json(path: Path, document: BaseModel | dict[str, Any] | list[Any]) -> None:
    """2-space indented UTF-8 JSON with a trailing newline."""
    if isinstance(document, BaseModel):
        text = document.model_dump_json(indent=2)
    else:
        text = json.dumps(document, indent=2, default=str)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n", encoding="utf-8")
