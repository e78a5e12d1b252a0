"""Kinetic simulator for a scaled two-species kinetic-Maxwell system with
reference solvers for its diffusive fluid limits and verification tooling."""

__version__ = "0.1.0"
