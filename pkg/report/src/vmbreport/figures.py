"""Figure generation from artifact tables.

Both entry points return the open matplotlib figure together with the files
written, so callers and tests can re-extract the plotted data from the
rendered artists instead of trusting the plotting code.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.figure import Figure

from .artifacts import (
    CONSERVED_COLUMNS,
    DISSIPATION_COLUMNS,
    ENERGY_COLUMNS,
    TIME_COLUMN,
    SchemaError,
    check_schema_version,
    load_json,
    read_table,
    require_columns,
)

FORMATS = ("svg", "png")

CAPTION_KEYS = ("config_hash", "code_version", "regime", "grid", "s")


@dataclass(frozen=True)
class EnergyFigure:
    paths: tuple[Path, ...]
    figure: Figure
    caption: str


@dataclass(frozen=True)
class ConvergenceFigure:
    paths: tuple[Path, ...]
    figure: Figure
    slopes: dict[str, float]


def _save(figure: Figure, out_dir: Path, stem: str) -> tuple[Path, ...]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for fmt in FORMATS:
        path = out_dir / f"{stem}.{fmt}"
        figure.savefig(path, format=fmt)
        paths.append(path)
    return tuple(paths)


def plot_energy(
    csv_path: Path | str,
    out_dir: Path | str,
    log_scale: bool = False,
    stem: str = "energy",
) -> EnergyFigure:
    """Decay functional and dissipation versus time, plus conservation drift.

    The drift panel appears only when the table carries the conserved-integral
    columns; a table without the time, energy, or dissipation columns is
    rejected with the first missing column named.
    """
    csv_path = Path(csv_path)
    metadata, columns, values = read_table(csv_path)
    require_columns(
        columns, (TIME_COLUMN,) + ENERGY_COLUMNS + DISSIPATION_COLUMNS, csv_path
    )
    if values.shape[0] == 0:
        raise SchemaError(f"{csv_path}: table has no data rows")
    t = values[:, columns.index(TIME_COLUMN)]

    with_drift = all(name in columns for name in CONSERVED_COLUMNS)
    n_rows = 2 if with_drift else 1
    figure, axes = plt.subplots(
        n_rows, 1, figsize=(7.0, 3.2 * n_rows), sharex=True, squeeze=False
    )

    ax = axes[0][0]
    for name in ENERGY_COLUMNS:
        ax.plot(t, values[:, columns.index(name)], label=name, linewidth=2.0)
    for name in DISSIPATION_COLUMNS:
        ax.plot(t, values[:, columns.index(name)], label=name, linewidth=1.0)
    if log_scale:
        ax.set_yscale("log")
    ax.set_ylabel("energy / dissipation")
    ax.legend(fontsize=8, ncol=2)
    ax.grid(True, alpha=0.3)

    if with_drift:
        ax = axes[1][0]
        for name in CONSERVED_COLUMNS:
            series = values[:, columns.index(name)]
            ax.plot(t, abs(series - series[0]), label=name, linewidth=1.0)
        ax.set_yscale("log")
        ax.set_ylabel("|drift from t=0|")
        ax.legend(fontsize=7, ncol=3)
        ax.grid(True, alpha=0.3)

    axes[-1][0].set_xlabel(TIME_COLUMN)
    caption = "  ".join(
        f"{key}={metadata[key]}" for key in CAPTION_KEYS if key in metadata
    )
    if caption:
        figure.text(0.01, 0.005, caption, fontsize=6, family="monospace")
    figure.tight_layout(rect=(0.0, 0.02, 1.0, 1.0))
    paths = _save(figure, Path(out_dir), stem)
    return EnergyFigure(paths=paths, figure=figure, caption=caption)


def plot_convergence(
    report: dict | Path | str,
    out_dir: Path | str,
    stem: str = "convergence",
) -> ConvergenceFigure:
    """Log-log error ladder with the fitted order annotated per quantity.

    The annotated values are copied from the report's ``orders`` entries,
    never refitted here; each annotation artist also carries the full float
    representation so the figure file embeds the exact value.
    """
    if not isinstance(report, dict):
        path = Path(report)
        report = load_json(path)
        check_schema_version(report, path)
    eps = list(report.get("eps_values", []))
    errors = report.get("errors", {})
    orders = report.get("orders", {})
    if not eps or not errors:
        raise SchemaError("report has no epsilon values or no error table")
    if len(eps) < 3:
        raise SchemaError(
            f"only {len(eps)} epsilon values; fitting an order needs at least "
            "3, so rerun the sweep with a longer ladder"
        )
    if not orders:
        raise SchemaError("report has no fitted orders to annotate")

    figure, ax = plt.subplots(figsize=(6.0, 4.5))
    slopes: dict[str, float] = {}
    for key in orders:
        if key not in errors:
            raise SchemaError(f"report order {key!r} has no matching error column")
        order = float(orders[key])
        slopes[key] = order
        line = ax.loglog(eps, errors[key], marker="o", label=key)[0]
        annotation = ax.annotate(
            f"{key}: slope {order:.2f}",
            xy=(eps[-1], errors[key][-1]),
            xytext=(4, 4),
            textcoords="offset points",
            fontsize=8,
            color=line.get_color(),
        )
        annotation.set_gid(f"slope:{key}:{order!r}")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("sup-in-time error")
    ax.invert_xaxis()
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    figure.tight_layout()
    paths = _save(figure, Path(out_dir), stem)
    return ConvergenceFigure(paths=paths, figure=figure, slopes=slopes)
