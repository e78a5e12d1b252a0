"""Command line for the kinetic solver, the fluid references, and the checks.

Subcommands: run-kinetic, run-fluid, sweep, check-collision, coefficients,
report-data.  Every run subcommand reads an optional YAML config file plus
``--set key.path=value`` overrides and writes self-describing artifacts.

Exit codes: 0 success, 2 invalid configuration or artifact, 3 diverged time
integration, 4 failed operator property check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from . import __version__
from .checks import FLAW_NAMES, collision_property_suite, failed_properties
from .collisions import CollisionBackend, transport_coefficients
from .config import ConfigError, load_run_config, load_sweep_plan
from .grid import SpectralGrid
from .harness import (
    DivergenceError,
    execute_fluid,
    execute_kinetic,
    execute_sweep,
    hash_mapping,
)
from .io import load_schema, read_diagnostics_csv, read_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_PROPERTY = 4


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _fail(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _config_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="YAML configuration file")
    sub.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY.PATH=VALUE",
        help="override one configuration entry; repeatable",
    )
    sub.add_argument("--out", help="shorthand for --set output.dir=...")


def _gather_overrides(args: argparse.Namespace) -> list[str]:
    overrides = list(args.overrides)
    if args.out is not None:
        overrides.append(f"output.dir={args.out}")
    return overrides


def cmd_run_kinetic(args: argparse.Namespace) -> int:
    config = load_run_config(args.config, _gather_overrides(args))
    artifacts = execute_kinetic(config)
    _emit(
        {
            "out_dir": str(artifacts.out_dir),
            "config_hash": artifacts.config_hash,
            "n_records": artifacts.summary["n_records"],
            "t_end": artifacts.summary["t_end"],
        }
    )
    return EXIT_OK


def cmd_run_fluid(args: argparse.Namespace) -> int:
    config = load_run_config(args.config, _gather_overrides(args))
    artifacts = execute_fluid(config)
    _emit(
        {
            "out_dir": str(artifacts.out_dir),
            "config_hash": artifacts.config_hash,
            "n_records": artifacts.summary["n_records"],
            "t_end": artifacts.summary["t_end"],
        }
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    plan = load_sweep_plan(args.config, _gather_overrides(args))
    report = execute_sweep(plan)
    _emit(
        {
            "out_dir": plan.base.out_dir,
            "config_hash": report["config_hash"],
            "eps_values": report["eps_values"],
            "orders": report["orders"],
            "checks": {
                k: v for k, v in report["checks"].items() if isinstance(v, bool)
            },
        }
    )
    return EXIT_OK


def _parse_rates(text: str | None):
    if text is None:
        return None
    try:
        rates = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse rates {text!r}: {exc}") from exc
    if not isinstance(rates, list):
        raise ConfigError("rates must be a YAML list of numbers")
    return [float(x) for x in rates]


def _backend_from_args(args: argparse.Namespace) -> CollisionBackend:
    grid = SpectralGrid(d_x=1, N_x=4, N_v=args.n_v)
    try:
        return CollisionBackend(grid, args.backend, rates=_parse_rates(args.rates))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_check_collision(args: argparse.Namespace) -> int:
    backend = _backend_from_args(args)
    results = collision_property_suite(backend, seed=args.seed, flaw=args.fixture)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(
            f"{status} {res.name}: measure={res.measure:.6e} "
            f"tolerance={res.tolerance:.6e}"
        )
    failures = failed_properties(results)
    if failures:
        print("violated assumptions:")
        for res in failures:
            print(f"  {res.name}: {res.detail}")
        return EXIT_PROPERTY
    print(f"all {len(results)} operator properties hold")
    return EXIT_OK


def cmd_coefficients(args: argparse.Namespace) -> int:
    backend = _backend_from_args(args)
    coeffs = transport_coefficients(backend)
    _emit(
        {
            "backend": args.backend,
            "N_v": args.n_v,
            "nu": coeffs["nu"],
            "kappa": coeffs["kappa"],
            "sigma": coeffs["sigma"],
            "viscosity": 1.5 * coeffs["nu"],
        }
    )
    return EXIT_OK


def _validate_artifact_dir(root: Path) -> dict:
    schema = load_schema("summary-json")
    table_schemas = {
        "run": ("diagnostics", load_schema("diagnostics-csv")["columns"]),
        "fluid-run": ("diagnostics", load_schema("fluid-diagnostics-csv")["columns"]),
    }
    paths = sorted(root.rglob("summary.json")) + sorted(root.rglob("report.json"))
    entries = []
    for path in paths:
        try:
            payload = read_json(path)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: unreadable artifact: {exc}") from exc
        kind = payload.get("kind")
        if kind not in schema["kinds"]:
            raise ConfigError(f"{path}: unknown artifact kind {kind!r}")
        missing = [k for k in schema["kinds"][kind]["required"] if k not in payload]
        if missing:
            raise ConfigError(f"{path}: missing required keys {missing}")
        if payload["schema_version"] != schema["schema_version"]:
            raise ConfigError(
                f"{path}: schema_version {payload['schema_version']!r} does not "
                f"match the shipped schema {schema['schema_version']!r}"
            )
        config_path = path.parent / "config.json"
        if config_path.exists():
            stored = read_json(config_path)
            expected = hash_mapping(stored.get("config", {}))
            if stored.get("config_hash") != expected:
                raise ConfigError(f"{config_path}: stored hash does not match content")
            if payload["config_hash"] != expected:
                raise ConfigError(
                    f"{path}: config_hash does not match the sibling config.json"
                )
        if kind in table_schemas:
            file_key, columns = table_schemas[kind]
            csv_name = payload.get("files", {}).get(file_key)
            if csv_name is not None:
                csv_path = path.parent / csv_name
                if not csv_path.exists():
                    raise ConfigError(f"{path}: listed table {csv_name} is missing")
                _, got_columns, _ = read_diagnostics_csv(csv_path)
                if got_columns != list(columns):
                    raise ConfigError(
                        f"{csv_path}: columns do not match the shipped schema"
                    )
        entry = {
            "path": str(path.relative_to(root)),
            "kind": kind,
            "config_hash": payload["config_hash"],
        }
        if "n_records" in payload:
            entry["n_records"] = payload["n_records"]
        if kind == "sweep":
            entry["eps_values"] = payload["eps_values"]
            entry["orders"] = payload["orders"]
        entries.append(entry)
    if not entries:
        raise ConfigError(f"no summary.json or report.json artifacts under {root}")
    return {"root": str(root), "artifacts": entries}


def cmd_report_data(args: argparse.Namespace) -> int:
    root = Path(args.directory)
    if not root.is_dir():
        raise ConfigError(f"{root} is not a directory")
    _emit(_validate_artifact_dir(root))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vmblimits",
        description="two-species kinetic solver with diffusive fluid limits",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("run-kinetic", help="run the kinetic solver")
    _config_args(sub)
    sub.set_defaults(func=cmd_run_kinetic)

    sub = subs.add_parser("run-fluid", help="run a fluid limit reference")
    _config_args(sub)
    sub.set_defaults(func=cmd_run_fluid)

    sub = subs.add_parser(
        "sweep", help="run an epsilon ladder against one fluid reference"
    )
    _config_args(sub)
    sub.set_defaults(func=cmd_sweep)

    for name, func, help_text in (
        ("check-collision", cmd_check_collision, "verify the operator properties"),
        ("coefficients", cmd_coefficients, "print the transport coefficients"),
    ):
        sub = subs.add_parser(name, help=help_text)
        sub.add_argument(
            "--backend",
            choices=("bgk", "spectral-diagonal"),
            default="bgk",
            help="collision model",
        )
        sub.add_argument("--n-v", type=int, default=12, help="Hermite modes per axis")
        sub.add_argument("--rates", help="custom per-degree rates as a YAML list")
        if name == "check-collision":
            sub.add_argument(
                "--fixture",
                choices=FLAW_NAMES,
                help="run against a deliberately flawed operator",
            )
            sub.add_argument("--seed", type=int, default=0)
        sub.set_defaults(func=func)

    sub = subs.add_parser(
        "report-data", help="validate artifacts and print their manifest"
    )
    sub.add_argument("directory", help="artifact directory to scan")
    sub.set_defaults(func=cmd_report_data)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _fail("invalid-config", str(exc))
        return EXIT_CONFIG
    except DivergenceError as exc:
        _fail("divergence", str(exc))
        return EXIT_DIVERGED
    except ValueError as exc:
        _fail("invalid-config", str(exc))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
