"""Command line: render figures and summaries for an artifact directory.

Scans a directory tree, draws an energy figure for every kinetic run table,
and a convergence figure plus a Markdown summary for every sweep report.
Exits with status 2 when any artifact fails schema validation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import matplotlib.pyplot as plt

from . import __version__
from .artifacts import SchemaError, SweepArtifact, check_schema_version, load_json
from .figures import plot_convergence, plot_energy
from .summary import render_summary

KNOWN_KINDS = ("run", "fluid-run", "sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vmbreport",
        description="figures and summaries from solver artifact directories",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("directory", help="artifact directory to render")
    parser.add_argument(
        "--out",
        help="write figures and summaries under this directory instead of "
        "next to the artifacts",
    )
    parser.add_argument(
        "--log-scale",
        action="store_true",
        help="logarithmic vertical axis on energy figures",
    )
    return parser


def _target_dir(root: Path, source_dir: Path, out: Path | None) -> Path:
    if out is None:
        return source_dir
    return out / source_dir.relative_to(root)


def render_directory(root: Path, out: Path | None, log_scale: bool) -> list[Path]:
    written: list[Path] = []

    for summary_path in sorted(root.rglob("summary.json")):
        payload = load_json(summary_path)
        check_schema_version(payload, summary_path)
        kind = payload.get("kind")
        if kind not in KNOWN_KINDS:
            raise SchemaError(f"{summary_path}: unknown artifact kind {kind!r}")
        if kind != "run":
            continue
        table_name = payload.get("files", {}).get("diagnostics")
        if table_name is None:
            raise SchemaError(f"{summary_path}: run lists no diagnostics table")
        target = _target_dir(root, summary_path.parent, out)
        result = plot_energy(
            summary_path.parent / table_name, target, log_scale=log_scale
        )
        plt.close(result.figure)
        written.extend(result.paths)

    for report_path in sorted(root.rglob("report.json")):
        sweep_dir = report_path.parent
        artifact = SweepArtifact.load(sweep_dir)
        target = _target_dir(root, sweep_dir, out)
        figure = plot_convergence(artifact.report, target)
        plt.close(figure.figure)
        written.extend(figure.paths)
        written.append(render_summary(artifact, target, figures=figure.paths))

    if not written:
        raise SchemaError(f"no artifacts to render under {root}")
    return written


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    root = Path(args.directory)
    if not root.is_dir():
        print(f"error: {root} is not a directory", file=sys.stderr)
        return 2
    out = Path(args.out) if args.out is not None else None
    try:
        written = render_directory(root, out, args.log_scale)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({"written": [str(p) for p in written]}, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
