"""Run orchestration: execute configured runs and sweeps and write artifacts.

Every run leaves a self-describing directory: ``config.json`` with the full
configuration and its hash, a CSV diagnostics table, a ``summary.json``
conforming to the shipped schema, and (for kinetic runs) a checkpoint.  A
sweep produces one such directory per epsilon, a single fluid reference run,
and a merged ``report.json`` with error tables, fitted orders, and structural
checks.  Identical configurations produce byte-identical artifacts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .collisions import kernel_part_L, transport_coefficients
from .config import ConfigError, RunConfig, SweepPlan
from .diagnostics import (
    CONSERVED_NAMES,
    DiagnosticRecord,
    diagnostic_record,
    fit_convergence,
    limit_residuals,
)
from .fluid import (
    FluidLimitConfig,
    FluidState,
    energy_balance,
    poisson_field,
    run_fluid,
    stable_dt_fluid,
)
from .grid import DistributionField, SpectralGrid, sobolev_norm
from .initial import build_fluid_state, build_state
from .integrator import KineticState, checkpoint_save, run, stable_dt
from .io import (
    SCHEMA_VERSION,
    canonical_json,
    config_hash,
    write_diagnostics_csv,
    write_json,
    write_table_csv,
)

ENERGY_KEYS = (
    "h_s",
    "h_tilde",
    "em_energy",
    "mixed_term",
    "v_ladder",
    "d_lambda",
    "d_field",
    "d_perp",
)

FLUID_COLUMNS = (
    "t",
    "kinetic",
    "thermal",
    "field",
    "charge",
    "dissipation_viscous",
    "dissipation_thermal",
    "dissipation_charge",
    "dissipation_ohmic",
    "total",
)

RESIDUAL_COLUMNS = (
    "t",
    "u_l2",
    "u_hs",
    "theta_l2",
    "theta_hs",
    "n_l2",
    "n_hs",
    "E_l2",
    "E_hs",
    "B_l2",
    "B_hs",
    "ohm_l2",
    "div_u_l2",
    "div_u_hs",
    "boussinesq_l2",
    "boussinesq_hs",
    "e_norm",
    "b_norm",
    "electrostatic_mismatch",
    "f_perp_hs",
)

# per limit, the comparison errors whose epsilon-order gets fitted
FIT_KEYS = {
    "nsf": ("u_l2", "theta_l2"),
    "nsp": ("u_l2", "theta_l2", "n_l2"),
    "nsw": ("u_l2", "theta_l2", "n_l2", "E_l2", "B_l2"),
}


class DivergenceError(RuntimeError):
    """The time integration produced a non-finite state."""


def hash_mapping(mapping: dict) -> str:
    """Configuration hash over the physics payload (the output paths are
    excluded, so moving a run directory does not change its identity)."""
    payload = {k: v for k, v in mapping.items() if k != "output"}
    return config_hash(payload)


def _ensure_dir(path: str) -> Path:
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
        probe = p / ".write-probe"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {p} is not writable: {exc}") from exc
    return p


def _l2(arr: np.ndarray, grid: SpectralGrid) -> float:
    return math.sqrt(float(np.sum(np.abs(arr) ** 2)) * grid.volume)


def _regime_payload(regime) -> dict:
    return {
        "tag": regime.tag,
        "epsilon": regime.epsilon,
        "alpha": regime.alpha,
        "beta": regime.beta,
        "gamma": regime.gamma,
    }


def _write_config_file(out: Path, mapping: dict) -> str:
    chash = hash_mapping(mapping)
    write_json(
        out / "config.json",
        {
            "schema_version": SCHEMA_VERSION,
            "code_version": __version__,
            "config_hash": chash,
            "config": mapping,
        },
    )
    return chash


@dataclass
class RunArtifacts:
    """What a single kinetic run produced, besides its files."""

    config: RunConfig
    out_dir: Path
    config_hash: str
    records: list[DiagnosticRecord]
    final_state: KineticState | None
    summary: dict


def execute_kinetic(config: RunConfig, record_hook=None) -> RunArtifacts:
    """Run the kinetic solver per the configuration and write its artifacts.

    record_hook, if given, is called as ``record_hook(state, index)`` right
    after each diagnostic record; sweeps use it to collect limit residuals.
    On divergence the partial artifacts are still written and
    :class:`DivergenceError` is raised.
    """
    out = _ensure_dir(config.out_dir)
    grid = config.grid()
    regime = config.scaling_regime()
    backend = config.collision_backend()
    coeffs = transport_coefficients(backend)
    f, g, E, B = build_state(config.initial_data(), grid, regime, coeffs["sigma"])
    state = KineticState(f, g, E, B, 0.0)

    mapping = config.to_mapping()
    chash = _write_config_file(out, mapping)

    dt_cap = stable_dt(grid, regime)
    if config.dt is not None:
        dt_cap = min(dt_cap, config.dt)

    records: list[DiagnosticRecord] = []
    previous: list[KineticState] = []

    def observer(st: KineticState, index: int) -> None:
        prev = previous[0] if previous else None
        dt_rec = st.time - prev.time if prev is not None else None
        records.append(
            diagnostic_record(st, regime, backend, prev=prev, dt=dt_rec, s=config.s)
        )
        if record_hook is not None:
            record_hook(st, index)
        previous[:] = [st.copy()]

    final: KineticState | None = None
    failure: str | None = None
    if config.t_end == 0.0:
        observer(state, 0)
        final = state
    else:
        try:
            final = run(
                state,
                regime,
                backend,
                t_final=config.t_end,
                dt=config.dt,
                scheme=config.scheme,
                record_dt=config.record_dt,
                observer=observer,
                gauss_mode=config.gauss_mode,
            )
        except FloatingPointError as exc:
            failure = str(exc)

    files = {"config": "config.json", "diagnostics": "diagnostics.csv"}
    if final is not None:
        files["checkpoint"] = "checkpoint.npz"

    metadata = {
        "config_hash": chash,
        "code_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "grid": canonical_json(mapping["grid"]),
        "regime": canonical_json(_regime_payload(regime)),
        "backend": canonical_json(mapping["backend"]),
        "s": config.s,
    }
    write_diagnostics_csv(out / "diagnostics.csv", records, metadata)
    if final is not None:
        checkpoint_save(out / "checkpoint.npz", final, regime)

    summary = _kinetic_summary(config, mapping, regime, chash, dt_cap, records, files)
    if failure is not None:
        summary["diverged"] = True
    write_json(out / "summary.json", summary)

    if failure is not None:
        raise DivergenceError(failure)
    return RunArtifacts(config, out, chash, records, final, summary)


def _kinetic_summary(config, mapping, regime, chash, dt_cap, records, files) -> dict:
    first = records[0].values
    last = records[-1].values
    h_vals = [rec.values["h_tilde"] for rec in records]
    increments = [b - a for a, b in zip(h_vals, h_vals[1:])]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "run",
        "config_hash": chash,
        "code_version": __version__,
        "grid": mapping["grid"],
        "regime": _regime_payload(regime),
        "backend": mapping["backend"],
        "s": config.s,
        "scheme": config.scheme,
        "dt": dt_cap,
        "t_end": config.t_end,
        "n_records": len(records),
        "conserved_initial": {k: first[k] for k in CONSERVED_NAMES},
        "conserved_final": {k: last[k] for k in CONSERVED_NAMES},
        "conserved_drift": {k: last[k] - first[k] for k in CONSERVED_NAMES},
        "energy_initial": {k: first[k] for k in ENERGY_KEYS},
        "energy_final": {k: last[k] for k in ENERGY_KEYS},
        "max_h_tilde_increment": max(increments, default=0.0),
        "files": files,
    }


@dataclass
class FluidArtifacts:
    """What a fluid reference run produced, besides its files."""

    config: RunConfig
    out_dir: Path
    config_hash: str
    rows: list[list[float]]
    states: list[FluidState]
    final_state: FluidState | None
    summary: dict


def execute_fluid(config: RunConfig) -> FluidArtifacts:
    """Run the limit-system solver per the configuration and write artifacts."""
    if config.regime_tag is None:
        raise ConfigError("the fluid solver needs a preset regime tag, not 'custom'")
    out = _ensure_dir(config.out_dir)
    grid = config.grid()
    backend = config.collision_backend()
    coeffs = transport_coefficients(backend)
    fluid_cfg = FluidLimitConfig(
        grid,
        config.regime_tag,
        nu=coeffs["nu"],
        kappa=coeffs["kappa"],
        sigma=coeffs["sigma"],
    )
    state = build_fluid_state(config.initial_data(), grid, config.regime_tag)
    dt = config.dt if config.dt is not None else stable_dt_fluid(fluid_cfg)

    mapping = config.to_mapping()
    chash = _write_config_file(out, mapping)

    rows: list[list[float]] = []
    states: list[FluidState] = []

    def observer(st: FluidState, index: int) -> None:
        balance = energy_balance(st, fluid_cfg)
        rows.append([st.time] + [balance[k] for k in FLUID_COLUMNS[1:]])
        states.append(st.copy())

    final: FluidState | None = None
    failure: str | None = None
    if config.t_end == 0.0:
        observer(state, 0)
        final = state
    else:
        try:
            final = run_fluid(
                state, fluid_cfg, config.t_end, dt, config.record_dt, observer
            )
        except FloatingPointError as exc:
            failure = str(exc)

    coefficients = {
        "nu": fluid_cfg.nu,
        "kappa": fluid_cfg.kappa,
        "sigma": fluid_cfg.sigma,
        "viscosity": fluid_cfg.viscosity,
    }
    metadata = {
        "config_hash": chash,
        "code_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "grid": canonical_json(mapping["grid"]),
        "limit": config.regime_tag,
        "coefficients": canonical_json(coefficients),
    }
    write_table_csv(out / "fluid.csv", FLUID_COLUMNS, rows, metadata)

    files = {"config": "config.json", "diagnostics": "fluid.csv"}
    summary = {
        "schema_version": SCHEMA_VERSION,
        "kind": "fluid-run",
        "config_hash": chash,
        "code_version": __version__,
        "grid": mapping["grid"],
        "limit": config.regime_tag,
        "coefficients": coefficients,
        "dt": dt,
        "t_end": config.t_end,
        "n_records": len(rows),
        "energy_initial": dict(zip(FLUID_COLUMNS[1:], rows[0][1:])),
        "energy_final": dict(zip(FLUID_COLUMNS[1:], rows[-1][1:])),
        "files": files,
    }
    if failure is not None:
        summary["diverged"] = True
    write_json(out / "summary.json", summary)
    if failure is not None:
        raise DivergenceError(failure)
    return FluidArtifacts(config, out, chash, rows, states, final, summary)


def _member_residual_row(state, fluid_state, grid, regime, backend, coeffs, s):
    res = limit_residuals(state, fluid_state, regime, backend, coeffs, s=s)
    res["e_norm"] = _l2(state.E.coeffs, grid)
    res["b_norm"] = _l2(state.B.coeffs, grid)
    n_kin = state.g.coeffs[..., 0, 0, 0]
    res["electrostatic_mismatch"] = _l2(
        state.E.coeffs - poisson_field(n_kin, grid), grid
    )
    perp = DistributionField(state.f.coeffs - kernel_part_L(state.f.coeffs), grid)
    res["f_perp_hs"] = sobolev_norm(perp, s, mode="lambda-x")
    return [state.time] + [res[key] for key in RESIDUAL_COLUMNS[1:]]


def _time_l2(times: list[float], values: list[float]) -> float:
    """L2-in-time norm of a sampled curve by the trapezoid rule."""
    if len(times) < 2:
        return 0.0
    t = np.asarray(times)
    v2 = np.asarray(values) ** 2
    return math.sqrt(float(np.sum(0.5 * (v2[1:] + v2[:-1]) * np.diff(t))))


def _run_sweep_member(
    plan: SweepPlan, index: int, fluid_states: list[FluidState]
) -> dict:
    config = plan.member(index)
    grid = config.grid()
    regime = config.scaling_regime()
    backend = config.collision_backend()
    coeffs = transport_coefficients(backend)
    rows: list[list[float]] = []

    def hook(state: KineticState, record_index: int) -> None:
        if record_index >= len(fluid_states):
            raise RuntimeError("kinetic and fluid record grids fell out of step")
        rows.append(
            _member_residual_row(
                state,
                fluid_states[record_index],
                grid,
                regime,
                backend,
                coeffs,
                config.s,
            )
        )

    metadata = {
        "config_hash": hash_mapping(config.to_mapping()),
        "code_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "epsilon": config.epsilon,
        "regime_tag": config.regime_tag,
    }
    try:
        artifacts = execute_kinetic(config, record_hook=hook)
    finally:
        if rows:
            write_table_csv(
                Path(config.out_dir) / "residuals.csv", RESIDUAL_COLUMNS, rows, metadata
            )

    sup = {
        key: max(row[i] for row in rows)
        for i, key in enumerate(RESIDUAL_COLUMNS)
        if key != "t"
    }
    times = [row[0] for row in rows]
    f_perp_index = RESIDUAL_COLUMNS.index("f_perp_hs")
    f_perp_l2t = _time_l2(times, [row[f_perp_index] for row in rows])

    h_vals = [rec.values["h_s"] for rec in artifacts.records]
    summary = dict(artifacts.summary)
    summary["epsilon"] = config.epsilon
    summary["residual_sup"] = sup
    summary["f_perp_l2t"] = f_perp_l2t
    write_json(artifacts.out_dir / "summary.json", summary)

    return {
        "epsilon": config.epsilon,
        "dir": artifacts.out_dir.name,
        "config_hash": artifacts.config_hash,
        "residual_sup": sup,
        "f_perp_l2t": f_perp_l2t,
        "max_h_tilde_increment": summary["max_h_tilde_increment"],
        "h_tilde_initial": artifacts.records[0].values["h_tilde"],
        "h_sup_ratio": max(h_vals) / h_vals[0] if h_vals[0] > 0 else math.inf,
    }


def _nonincreasing(values) -> bool:
    return all(b <= a * (1.0 + 1e-12) for a, b in zip(values, values[1:]))


def execute_sweep(plan: SweepPlan) -> dict:
    """Run the epsilon ladder against one fluid reference and merge a report.

    Members run independently (optionally in worker threads) and write full
    per-run artifacts; a failing member aborts the sweep after every worker
    finishes, leaving the partial artifacts in place.
    """
    out = _ensure_dir(plan.base.out_dir)
    mapping = plan.to_mapping()
    chash = _write_config_file(out, mapping)
    tag = plan.base.regime_tag

    # The reference orbit is the convergence target, so it must be integrated
    # more accurately than any member; its own stability bound can be far
    # coarser than the wave phases the comparison needs.  Reuse the finest
    # member's kinetic step unless the user pinned one.
    fluid_dt = plan.base.dt
    if fluid_dt is None:
        finest = plan.member(len(plan.eps_values) - 1)
        fluid_dt = stable_dt(finest.grid(), finest.scaling_regime())
    fluid_config = replace(
        plan.base,
        dt=fluid_dt,
        out_dir=str(Path(plan.base.out_dir) / "fluid-reference"),
    )
    fluid = execute_fluid(fluid_config)

    results: list[dict | None] = [None] * len(plan.eps_values)
    if plan.workers == 1:
        for i in range(len(plan.eps_values)):
            results[i] = _run_sweep_member(plan, i, fluid.states)
    else:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            futures = [
                pool.submit(_run_sweep_member, plan, i, fluid.states)
                for i in range(len(plan.eps_values))
            ]
            error: Exception | None = None
            for i, future in enumerate(futures):
                try:
                    results[i] = future.result()
                except Exception as exc:
                    if error is None:
                        error = exc
            if error is not None:
                raise error

    eps = list(plan.eps_values)
    errors = {
        key: [member["residual_sup"][key] for member in results]
        for key in RESIDUAL_COLUMNS
        if key != "t"
    }
    errors["f_perp_l2t"] = [member["f_perp_l2t"] for member in results]
    fit = fit_convergence(eps, {key: errors[key] for key in FIT_KEYS[tag]})

    f_perp = errors["f_perp_l2t"]
    f_perp_scaled = [v / e for v, e in zip(f_perp, eps)]
    scale = max(f_perp_scaled[0], 1e-300)
    checks = {
        "h_tilde_monotone": all(
            m["max_h_tilde_increment"] <= 1e-10 * max(m["h_tilde_initial"], 1e-300)
            for m in results
        ),
        "h_uniformly_bounded": all(m["h_sup_ratio"] <= 2.0 for m in results),
        "h_sup_ratio_max": max(m["h_sup_ratio"] for m in results),
        "f_perp_decreasing": _nonincreasing(f_perp),
        "f_perp_over_eps_bounded": max(f_perp_scaled) <= 10.0 * scale
        if scale > 0
        else True,
        "f_perp_over_eps": f_perp_scaled,
    }
    if tag == "nsf":
        checks["e_vanishing"] = _nonincreasing(errors["e_norm"])
        checks["b_vanishing"] = _nonincreasing(errors["b_norm"])
    elif tag == "nsp":
        checks["b_vanishing"] = _nonincreasing(errors["b_norm"])
        checks["electrostatic_slaving_decreasing"] = _nonincreasing(
            errors["electrostatic_mismatch"]
        )
    else:
        checks["ohm_residual_decreasing"] = _nonincreasing(errors["ohm_l2"])

    report = {
        "schema_version": SCHEMA_VERSION,
        "kind": "sweep",
        "config_hash": chash,
        "code_version": __version__,
        "regime_tag": tag,
        "eps_values": eps,
        "members": [
            {
                "epsilon": m["epsilon"],
                "dir": m["dir"],
                "config_hash": m["config_hash"],
            }
            for m in results
        ],
        "errors": errors,
        "orders": fit.orders,
        "fit_residuals": fit.fit_residuals,
        "checks": checks,
        "files": {
            "config": "config.json",
            "fluid_reference": "fluid-reference/fluid.csv",
            "report": "report.json",
        },
    }
    write_json(out / "report.json", report)
    return report
