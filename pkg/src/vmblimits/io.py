"""Artifact serialization: deterministic CSV and JSON output plus config hashing.

Identical inputs must produce byte-identical files, so every float is written
through repr (shortest round-trip form), JSON keys are sorted, and no
wall-clock data enters any artifact.  Non-finite values become 'nan'/'inf'
text in CSV and null in JSON.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .diagnostics import RECORD_COLUMNS, DiagnosticRecord

SCHEMA_VERSION = "1"


def _jsonable(obj):
    """Plain-Python copy of a payload: numpy scalars and arrays unwrapped,
    non-finite floats mapped to None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if obj is None or isinstance(obj, (str, bool)):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__} into an artifact")


def canonical_json(payload) -> str:
    """Minimal sorted-key rendering used for hashing."""
    return json.dumps(_jsonable(payload), sort_keys=True, separators=(",", ":"))


def config_hash(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


def write_json(path, payload) -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def format_float(x: float) -> str:
    return repr(float(x))


def write_diagnostics_csv(path, records: list[DiagnosticRecord], metadata: dict) -> None:
    """One row per record in the fixed column order, preceded by '# key=value'
    metadata lines (config hash, grid, regime, backend, code version)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        for key in sorted(metadata):
            fh.write(f"# {key}={metadata[key]}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_COLUMNS)
        for rec in records:
            writer.writerow([format_float(v) for v in rec.row()])


def write_table_csv(path, columns: list[str], rows, metadata: dict) -> None:
    """Generic numeric table in the same layout as the diagnostics file."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        for key in sorted(metadata):
            fh.write(f"# {key}={metadata[key]}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(columns))
        for row in rows:
            writer.writerow([format_float(v) for v in row])


def read_diagnostics_csv(path) -> tuple[dict, list[str], np.ndarray]:
    """Metadata dict, column names, and the data matrix of a diagnostics file."""
    metadata: dict[str, str] = {}
    rows: list[list[float]] = []
    columns: list[str] | None = None
    with Path(path).open(newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                metadata[key.strip()] = value
                continue
            cells = next(csv.reader([line]))
            if columns is None:
                columns = cells
            else:
                rows.append([float(c) for c in cells])
    if columns is None:
        raise ValueError(f"{path} has no header row")
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(columns)))
    return metadata, columns, data


def load_schema(name: str) -> dict:
    """Schema document shipped with the package ('diagnostics-csv',
    'fluid-diagnostics-csv' or 'summary-json')."""
    ref = resources.files("vmblimits").joinpath(f"schema/{name}.json")
    return json.loads(ref.read_text())
