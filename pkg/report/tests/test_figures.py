"""Figure generation: file outputs, re-extracted data, error handling."""

import numpy as np
import pytest
import matplotlib.pyplot as plt

from vmbreport.artifacts import CONSERVED_COLUMNS, SchemaError
from vmbreport.figures import plot_convergence, plot_energy

ENERGY_HEADER = "t,h_tilde,d_lambda,d_field,d_perp"


def write_energy_csv(path, rows, metadata=()):
    lines = [f"#{k}={v}" for k, v in metadata]
    lines.append(ENERGY_HEADER)
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


class TestEnergyFigure:
    def test_minimal_two_row_table(self, tmp_path):
        csv_path = tmp_path / "diagnostics.csv"
        write_energy_csv(csv_path, [[0.0, 1.0, 0.1, 0.2, 0.3], [0.5, 0.9, 0.1, 0.2, 0.3]])
        result = plot_energy(csv_path, tmp_path / "figs")
        try:
            assert [p.suffix for p in result.paths] == [".svg", ".png"]
            assert all(p.is_file() and p.stat().st_size > 0 for p in result.paths)
            assert len(result.figure.axes) == 1  # no conserved columns, no drift panel
        finally:
            plt.close(result.figure)

    def test_monotone_series_plots_monotone_curve(self, tmp_path):
        csv_path = tmp_path / "diagnostics.csv"
        t = np.linspace(0.0, 1.0, 9)
        rows = [[ti, np.exp(-2.0 * ti), 0.5, 0.25, 0.25] for ti in t]
        write_energy_csv(csv_path, rows)
        result = plot_energy(csv_path, tmp_path / "figs")
        try:
            # re-extract the rendered data instead of trusting the inputs
            curve = result.figure.axes[0].lines[0].get_ydata()
            assert all(b < a for a, b in zip(curve, curve[1:]))
        finally:
            plt.close(result.figure)

    def test_log_scale_option(self, tmp_path):
        csv_path = tmp_path / "diagnostics.csv"
        write_energy_csv(csv_path, [[0.0, 1.0, 0.1, 0.2, 0.3], [1.0, 0.5, 0.1, 0.2, 0.3]])
        result = plot_energy(csv_path, tmp_path / "figs", log_scale=True)
        try:
            assert result.figure.axes[0].get_yscale() == "log"
        finally:
            plt.close(result.figure)

    def test_conserved_columns_add_drift_panel(self, tmp_path):
        csv_path = tmp_path / "diagnostics.csv"
        header = ENERGY_HEADER + "," + ",".join(CONSERVED_COLUMNS)
        rows = [
            [0.0, 1.0, 0.1, 0.2, 0.3] + [0.5] * len(CONSERVED_COLUMNS),
            [1.0, 0.8, 0.1, 0.2, 0.3] + [0.5 + 1e-9] * len(CONSERVED_COLUMNS),
        ]
        csv_path.write_text(
            header + "\n" + "\n".join(",".join(map(repr, r)) for r in rows) + "\n"
        )
        result = plot_energy(csv_path, tmp_path / "figs")
        try:
            assert len(result.figure.axes) == 2
            drift = result.figure.axes[1].lines[0].get_ydata()
            assert drift[0] == 0.0 and drift[1] == pytest.approx(1e-9)
        finally:
            plt.close(result.figure)

    def test_metadata_becomes_caption(self, tmp_path):
        csv_path = tmp_path / "diagnostics.csv"
        write_energy_csv(
            csv_path,
            [[0.0, 1.0, 0.1, 0.2, 0.3], [1.0, 0.5, 0.1, 0.2, 0.3]],
            metadata=[("config_hash", "f" * 64), ("s", "3")],
        )
        result = plot_energy(csv_path, tmp_path / "figs")
        try:
            assert "config_hash=" + "f" * 64 in result.caption
            assert "s=3" in result.caption
            svg = (tmp_path / "figs" / "energy.svg").read_text()
            assert "f" * 64 in svg
        finally:
            plt.close(result.figure)

    def test_missing_column_named(self, tmp_path):
        csv_path = tmp_path / "diagnostics.csv"
        csv_path.write_text("t,d_lambda,d_field,d_perp\n0.0,0.1,0.2,0.3\n")
        with pytest.raises(SchemaError, match="'h_tilde'"):
            plot_energy(csv_path, tmp_path / "figs")

    def test_table_without_rows_rejected(self, tmp_path):
        csv_path = tmp_path / "diagnostics.csv"
        csv_path.write_text(ENERGY_HEADER + "\n")
        with pytest.raises(SchemaError, match="no data rows"):
            plot_energy(csv_path, tmp_path / "figs")


class TestConvergenceFigure:
    def synthetic_report(self, eps=(0.1, 0.05, 0.025), order=1.0):
        return {
            "eps_values": list(eps),
            "errors": {"u_l2": [0.5 * e for e in eps]},
            "orders": {"u_l2": order},
        }

    def test_exact_first_order_annotation(self, tmp_path):
        result = plot_convergence(self.synthetic_report(), tmp_path)
        try:
            assert result.slopes == {"u_l2": 1.0}
            svg = (tmp_path / "convergence.svg").read_text()
            assert "slope 1.00" in svg
            assert "slope:u_l2:1.0" in svg  # exact value embedded via the gid
        finally:
            plt.close(result.figure)

    def test_annotation_value_is_verbatim_from_report(self, tmp_path):
        order = 0.8437519283745612
        result = plot_convergence(self.synthetic_report(order=order), tmp_path)
        try:
            assert result.slopes["u_l2"] == order
            assert f"slope:u_l2:{order!r}" in (tmp_path / "convergence.svg").read_text()
        finally:
            plt.close(result.figure)

    def test_two_points_refused_with_guidance(self, tmp_path):
        with pytest.raises(SchemaError, match="at least\n?.*3"):
            plot_convergence(self.synthetic_report(eps=(0.1, 0.05)), tmp_path)

    def test_empty_table_refused(self, tmp_path):
        with pytest.raises(SchemaError, match="no epsilon"):
            plot_convergence({"eps_values": [], "errors": {}, "orders": {}}, tmp_path)

    def test_order_without_error_column_rejected(self, tmp_path):
        report = self.synthetic_report()
        report["orders"]["theta_l2"] = 1.0
        with pytest.raises(SchemaError, match="theta_l2"):
            plot_convergence(report, tmp_path)

    def test_loads_report_from_path(self, tmp_path):
        import json

        path = tmp_path / "report.json"
        payload = self.synthetic_report()
        payload["schema_version"] = "1"
        path.write_text(json.dumps(payload))
        result = plot_convergence(path, tmp_path / "figs")
        try:
            assert result.slopes == {"u_l2": 1.0}
        finally:
            plt.close(result.figure)
