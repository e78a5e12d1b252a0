"""Readers for the solver's artifact files.

The file contract: numeric tables are CSV with ``#key=value`` comment lines
before the header, and every directory-level summary is a JSON object with a
``schema_version`` and a ``kind``.  The constants below restate the parts of
that contract this package consumes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

KNOWN_SCHEMA_VERSIONS = ("1",)

TIME_COLUMN = "t"
ENERGY_COLUMNS = ("h_tilde",)
DISSIPATION_COLUMNS = ("d_lambda", "d_field", "d_perp")
CONSERVED_COLUMNS = (
    "momentum_x",
    "momentum_y",
    "momentum_z",
    "theta_field_energy",
    "mass",
    "charge",
    "b_flux_x",
    "b_flux_y",
    "b_flux_z",
)

REGIME_BANNERS = {
    "nsf": "incompressible Navier-Stokes-Fourier limit",
    "nsp": "Navier-Stokes-Fourier-Poisson limit",
    "nsw": "Navier-Stokes-Fourier-Maxwell limit",
}

SWEEP_REQUIRED = (
    "schema_version",
    "kind",
    "config_hash",
    "code_version",
    "regime_tag",
    "eps_values",
    "members",
    "errors",
    "orders",
    "checks",
)


class SchemaError(ValueError):
    """An artifact does not match the documented file contract."""


def load_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read artifact: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    return payload


def check_schema_version(payload: dict, path: Path) -> None:
    version = payload.get("schema_version")
    if version not in KNOWN_SCHEMA_VERSIONS:
        raise SchemaError(
            f"{path}: unrecognized schema_version {version!r}; "
            f"this tool understands {', '.join(KNOWN_SCHEMA_VERSIONS)}"
        )


def read_table(path: Path) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Parse a commented CSV table into metadata, column names, and values.

    Metadata lines start with ``#`` and hold one ``key=value`` pair each;
    the first non-comment line is the header.  Values parse as floats, with
    ``nan`` allowed.
    """
    metadata: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("#"):
                    key, sep, value = line[1:].strip().partition("=")
                    if sep:
                        metadata[key] = value
                    continue
                cells = next(csv.reader([line]))
                if not cells or cells == [""]:
                    continue
                if header is None:
                    header = cells
                    continue
                try:
                    rows.append([float(cell) for cell in cells])
                except ValueError as exc:
                    raise SchemaError(
                        f"{path}: non-numeric cell in row {len(rows) + 2}: {exc}"
                    ) from exc
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read table: {exc}") from exc
    if header is None:
        raise SchemaError(f"{path}: no header row found")
    if any(len(row) != len(header) for row in rows):
        raise SchemaError(f"{path}: row width does not match the header")
    values = np.asarray(rows, dtype=float) if rows else np.empty((0, len(header)))
    return metadata, header, values


def require_columns(columns: list[str], needed, path: Path) -> None:
    missing = [name for name in needed if name not in columns]
    if missing:
        raise SchemaError(
            f"{path}: missing column {missing[0]!r}"
            + (f" (and {len(missing) - 1} more)" if len(missing) > 1 else "")
        )


@dataclass(frozen=True)
class SweepArtifact:
    """A parsed sweep directory: merged report plus per-member tables."""

    root: Path
    report: dict
    member_dirs: tuple[Path, ...]
    member_tables: tuple[Path, ...]

    @property
    def regime_tag(self) -> str:
        return self.report["regime_tag"]

    @property
    def banner(self) -> str:
        return REGIME_BANNERS.get(self.regime_tag, self.regime_tag)

    @property
    def eps_values(self) -> list[float]:
        return list(self.report["eps_values"])

    @classmethod
    def load(cls, root: Path | str) -> "SweepArtifact":
        root = Path(root)
        report_path = root / "report.json"
        if not report_path.is_file():
            raise SchemaError(f"{root}: no report.json; not a sweep directory")
        report = load_json(report_path)
        check_schema_version(report, report_path)
        if report.get("kind") != "sweep":
            raise SchemaError(
                f"{report_path}: kind {report.get('kind')!r} is not 'sweep'"
            )
        missing = [key for key in SWEEP_REQUIRED if key not in report]
        if missing:
            raise SchemaError(f"{report_path}: missing required keys {missing}")

        member_dirs = []
        member_tables = []
        for member, eps in zip(report["members"], report["eps_values"]):
            member_dir = root / member["dir"]
            summary_path = member_dir / "summary.json"
            summary = load_json(summary_path)
            check_schema_version(summary, summary_path)
            if summary.get("epsilon") != eps:
                raise SchemaError(
                    f"{summary_path}: member epsilon {summary.get('epsilon')!r} "
                    f"does not match the report value {eps!r}"
                )
            table = member_dir / "residuals.csv"
            if not table.is_file():
                raise SchemaError(f"{member_dir}: missing residuals.csv")
            member_dirs.append(member_dir)
            member_tables.append(table)
        if len(member_dirs) != len(report["eps_values"]):
            raise SchemaError(
                f"{report_path}: member list does not cover every epsilon"
            )
        return cls(
            root=root,
            report=report,
            member_dirs=tuple(member_dirs),
            member_tables=tuple(member_tables),
        )
