"""Figures and one-page summaries from solver artifact directories.

This package only reads the documented CSV and JSON file formats written by
the solver harness; it never imports the solver and never recomputes any
physics.  Every number it displays is copied verbatim from an artifact cell.
"""

from .artifacts import SchemaError, SweepArtifact, read_table
from .figures import plot_convergence, plot_energy
from .summary import render_summary

__all__ = [
    "SchemaError",
    "SweepArtifact",
    "read_table",
    "plot_energy",
    "plot_convergence",
    "render_summary",
]

__version__ = "0.1.0"
