"""One-page Markdown summary of a sweep directory.

Every numeric value on the page is written with ``repr`` straight from a
report cell, so a reader (or a test) can trace each displayed number back to
the artifact bit for bit.
"""

from __future__ import annotations

import os
from pathlib import Path

from .artifacts import SweepArtifact


def _num(value) -> str:
    return repr(value)


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("| " + " | ".join("---" for _ in header) + " |")
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return lines


def render_summary(
    artifact: SweepArtifact | Path | str,
    out_dir: Path | str,
    figures: tuple[Path, ...] = (),
) -> Path:
    """Write ``summary.md`` for one sweep and return its path."""
    if not isinstance(artifact, SweepArtifact):
        artifact = SweepArtifact.load(artifact)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = artifact.report
    eps = report["eps_values"]

    lines = [f"# Sweep report: {artifact.banner}", ""]
    lines += [
        f"- regime tag: `{artifact.regime_tag}`",
        f"- schema version: {report['schema_version']}, "
        f"code version: {report['code_version']}",
        f"- configuration hash: `{report['config_hash']}`",
        "- epsilon ladder: " + ", ".join(_num(e) for e in eps),
        "",
    ]

    lines += ["## Fitted orders", ""]
    lines += _table(
        ["quantity", "order"],
        [[key, _num(value)] for key, value in report["orders"].items()],
    )
    lines += [""]

    lines += ["## Errors by epsilon", ""]
    shown = [key for key in report["errors"] if key in report["orders"]]
    shown += [key for key in ("f_perp_l2t",) if key in report["errors"]]
    lines += _table(
        ["quantity"] + [f"eps={_num(e)}" for e in eps],
        [
            [key] + [_num(v) for v in report["errors"][key]]
            for key in shown
        ],
    )
    lines += [""]

    lines += ["## Checks", ""]
    measured = []
    for name, value in report["checks"].items():
        if isinstance(value, bool):
            lines.append(f"- {'PASS' if value else 'FAIL'} {name}")
        elif isinstance(value, list):
            measured.append(f"- {name}: " + ", ".join(_num(v) for v in value))
        else:
            measured.append(f"- {name}: {_num(value)}")
    if measured:
        lines += ["", "### Measured bounds", ""] + measured
    lines += [""]

    lines += ["## Members", ""]
    lines += _table(
        ["epsilon", "directory"],
        [
            [_num(member["epsilon"]), f"`{member['dir']}`"]
            for member in report["members"]
        ],
    )
    lines += [""]

    lines += ["## Figures", ""]
    if figures:
        for path in figures:
            rel = os.path.relpath(Path(path), out_dir)
            lines.append(f"- [{Path(path).name}]({rel})")
    else:
        lines.append("- no figures generated")
    lines += [""]

    out_path = out_dir / "summary.md"
    out_path.write_text("\n".join(lines), encoding="utf-8")
    return out_path
