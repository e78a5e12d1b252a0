"""Run and sweep configuration: defaults, file loading, overrides, profiles.

A configuration is a nested mapping with a fixed shape.  Values come from
three layers, later layers winning: built-in defaults, an optional YAML file,
and ``key.path=value`` override strings from the command line.  Override
values are parsed as YAML scalars, so ``time.dt=0.001`` yields a float and
``backend.rates=[1,2,3]`` a list.

The typed views (:class:`RunConfig`, :class:`SweepPlan`) validate the values
and build the actual simulation objects; the canonical nested mapping is what
gets hashed and embedded in artifacts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import yaml

from .collisions import CollisionBackend
from .grid import SpectralGrid
from .initial import InitialData
from .regime import PRESET_TAGS, ScalingRegime

PROFILE_NAMES = ("shear-mode", "charge-mode", "mixed")
SCHEMES = ("IMEX1", "IMEX2")
GAUSS_MODES = ("monitor", "clean")

# perturbation amplitudes above this leave the near-equilibrium range the
# solver is built for, so they are rejected up front
AMPLITUDE_BOUND = 0.25


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def default_run_mapping() -> dict:
    """Nested mapping with every run setting at its default."""
    return {
        "grid": {"d_x": 1, "N_x": 32, "N_v": 12, "L_x": 2.0 * math.pi},
        "regime": {"tag": "nsw", "epsilon": 0.1, "alpha": None, "gamma": None},
        "backend": {"kind": "bgk", "rates": None},
        "initial": {"profile": "mixed", "amplitude": 0.05},
        "time": {"dt": None, "t_end": 1.0, "scheme": "IMEX2", "record_dt": None},
        "diagnostics": {"s": 3, "gauss_mode": "monitor"},
        "output": {"dir": "runs/out"},
        "seed": 0,
    }


def default_sweep_mapping() -> dict:
    """Run defaults plus the sweep block (epsilon ladder and worker count).

    The default horizon is shorter than for a single run because the smallest
    ladder member pays for its stiffness with a proportionally smaller step.
    """
    out = default_run_mapping()
    out["time"]["t_end"] = 0.5
    out["time"]["record_dt"] = 0.0625
    out["sweep"] = {"eps_values": [0.1, 0.05, 0.025, 0.0125], "workers": 1}
    return out


def _k(k: int, d_x: int) -> tuple[int, ...]:
    """Wavenumber along the first axis, admissible in any spatial dimension."""
    return (k,) + (0,) * (d_x - 1)


def profile_data(name: str, amplitude: float, d_x: int = 1) -> InitialData:
    """Named well-prepared moment profiles available to the command line.

    shear-mode: transverse velocity shear with a weak temperature contrast,
    no charge.  charge-mode: charge-dominated perturbation driving the
    electrostatic branch.  mixed: every moment and both fields populated.
    """
    a = float(amplitude)
    if name == "shear-mode":
        return InitialData(
            u={_k(1, d_x): (0.0, a, 0.0), _k(2, d_x): (0.0, 0.0, 0.5j * a)},
            theta={_k(1, d_x): 0.4 * a},
        )
    if name == "charge-mode":
        return InitialData(
            n={_k(1, d_x): a, _k(2, d_x): -0.4j * a},
            u={_k(1, d_x): (0.0, 0.6 * a, 0.0)},
            theta={_k(1, d_x): 0.4 * a},
        )
    if name == "mixed":
        return InitialData(
            u={_k(1, d_x): (0.0, a, 0.3j * a), _k(2, d_x): (0.0, 0.4j * a, 0.0)},
            theta={_k(1, d_x): a, _k(2, d_x): 0.25j * a},
            n={_k(1, d_x): 0.8 * a, _k(2, d_x): -0.3j * a},
            E={_k(1, d_x): (0.0, 0.5 * a, 0.2 * a)},
            B={_k(1, d_x): (0.0, 0.3 * a, 0.6 * a)},
        )
    raise ConfigError(f"unknown profile {name!r}, expected one of {PROFILE_NAMES}")


@dataclass(frozen=True)
class RunConfig:
    """Typed view of a single-run configuration."""

    d_x: int = 1
    N_x: int = 32
    N_v: int = 12
    L_x: float = 2.0 * math.pi
    regime_tag: str | None = "nsw"
    epsilon: float = 0.1
    alpha: float | None = None
    gamma: float | None = None
    backend_kind: str = "bgk"
    rates: tuple[float, ...] | None = None
    profile: str = "mixed"
    amplitude: float = 0.05
    dt: float | None = None
    t_end: float = 1.0
    scheme: str = "IMEX2"
    record_dt: float | None = None
    s: int = 3
    gauss_mode: str = "monitor"
    out_dir: str = "runs/out"
    seed: int = 0

    @classmethod
    def from_mapping(cls, mapping: dict) -> "RunConfig":
        g = mapping["grid"]
        r = mapping["regime"]
        b = mapping["backend"]
        init = mapping["initial"]
        t = mapping["time"]
        d = mapping["diagnostics"]
        tag = r["tag"]
        rates = b["rates"]
        cfg = cls(
            d_x=_as_int(g["d_x"], "grid.d_x"),
            N_x=_as_int(g["N_x"], "grid.N_x"),
            N_v=_as_int(g["N_v"], "grid.N_v"),
            L_x=_as_float(g["L_x"], "grid.L_x"),
            regime_tag=None if tag == "custom" else tag,
            epsilon=_as_float(r["epsilon"], "regime.epsilon"),
            alpha=_as_opt_float(r["alpha"], "regime.alpha"),
            gamma=_as_opt_float(r["gamma"], "regime.gamma"),
            backend_kind=str(b["kind"]),
            rates=None if rates is None else tuple(float(x) for x in rates),
            profile=str(init["profile"]),
            amplitude=_as_float(init["amplitude"], "initial.amplitude"),
            dt=_as_opt_float(t["dt"], "time.dt"),
            t_end=_as_float(t["t_end"], "time.t_end"),
            scheme=str(t["scheme"]),
            record_dt=_as_opt_float(t["record_dt"], "time.record_dt"),
            s=_as_int(d["s"], "diagnostics.s"),
            gauss_mode=str(d["gauss_mode"]),
            out_dir=str(mapping["output"]["dir"]),
            seed=_as_int(mapping["seed"], "seed"),
        )
        cfg.validate()
        return cfg

    def to_mapping(self) -> dict:
        """Canonical nested mapping; the basis for hashing and artifacts."""
        return {
            "grid": {"d_x": self.d_x, "N_x": self.N_x, "N_v": self.N_v, "L_x": self.L_x},
            "regime": {
                "tag": "custom" if self.regime_tag is None else self.regime_tag,
                "epsilon": self.epsilon,
                "alpha": self.alpha,
                "gamma": self.gamma,
            },
            "backend": {
                "kind": self.backend_kind,
                "rates": None if self.rates is None else list(self.rates),
            },
            "initial": {"profile": self.profile, "amplitude": self.amplitude},
            "time": {
                "dt": self.dt,
                "t_end": self.t_end,
                "scheme": self.scheme,
                "record_dt": self.record_dt,
            },
            "diagnostics": {"s": self.s, "gauss_mode": self.gauss_mode},
            "output": {"dir": self.out_dir},
            "seed": self.seed,
        }

    def validate(self) -> None:
        if self.regime_tag is None:
            if self.alpha is None or self.gamma is None:
                raise ConfigError(
                    "the custom regime requires regime.alpha and regime.gamma"
                )
        elif self.regime_tag not in PRESET_TAGS:
            raise ConfigError(
                f"unknown regime tag {self.regime_tag!r}, "
                f"expected one of {PRESET_TAGS} or 'custom'"
            )
        elif self.alpha is not None or self.gamma is not None:
            raise ConfigError(
                "regime.alpha and regime.gamma apply only to the custom regime"
            )
        if self.profile not in PROFILE_NAMES:
            raise ConfigError(
                f"unknown profile {self.profile!r}, expected one of {PROFILE_NAMES}"
            )
        if not 0.0 <= self.amplitude <= AMPLITUDE_BOUND:
            raise ConfigError(
                f"initial.amplitude must lie in [0, {AMPLITUDE_BOUND}], "
                f"got {self.amplitude}"
            )
        if self.scheme not in SCHEMES:
            raise ConfigError(
                f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}"
            )
        if self.gauss_mode not in GAUSS_MODES:
            raise ConfigError(
                f"unknown gauss_mode {self.gauss_mode!r}, "
                f"expected one of {GAUSS_MODES}"
            )
        if self.dt is not None and self.dt <= 0:
            raise ConfigError("time.dt must be positive when given")
        if self.t_end < 0:
            raise ConfigError("time.t_end must not be negative")
        if self.record_dt is not None and self.record_dt <= 0:
            raise ConfigError("time.record_dt must be positive when given")
        if self.s < 1:
            raise ConfigError("diagnostics.s must be at least 1")
        if not self.out_dir:
            raise ConfigError("output.dir must not be empty")
        try:
            self.scaling_regime()
            self.collision_backend()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self) -> SpectralGrid:
        try:
            return SpectralGrid(d_x=self.d_x, N_x=self.N_x, N_v=self.N_v, L_x=self.L_x)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def scaling_regime(self) -> ScalingRegime:
        if self.regime_tag is None:
            return ScalingRegime.custom(self.epsilon, self.alpha, self.gamma)
        return ScalingRegime.from_preset(self.regime_tag, self.epsilon)

    def collision_backend(self) -> CollisionBackend:
        grid = self.grid()
        rates = None if self.rates is None else list(self.rates)
        return CollisionBackend(grid, self.backend_kind, rates=rates)

    def initial_data(self) -> InitialData:
        return profile_data(self.profile, self.amplitude, self.d_x)


@dataclass(frozen=True)
class SweepPlan:
    """A run template plus the epsilon ladder it is repeated over.

    The moment profile is held fixed across members; only epsilon changes,
    and the structural constraints are re-balanced per member when the
    kinetic state is rebuilt.
    """

    base: RunConfig
    eps_values: tuple[float, ...]
    workers: int = 1

    def __post_init__(self) -> None:
        if self.base.regime_tag is None:
            raise ConfigError("a sweep requires a preset regime tag, not 'custom'")
        eps = tuple(float(e) for e in self.eps_values)
        if len(eps) < 3:
            raise ConfigError("sweep.eps_values needs at least three values")
        if any(not 0.0 < e < 1.0 for e in eps):
            raise ConfigError("sweep.eps_values must lie strictly between 0 and 1")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError("sweep.eps_values must be strictly decreasing")
        if self.workers < 1:
            raise ConfigError("sweep.workers must be at least 1")
        object.__setattr__(self, "eps_values", eps)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "SweepPlan":
        body = {k: v for k, v in mapping.items() if k != "sweep"}
        base = RunConfig.from_mapping(body)
        sw = mapping["sweep"]
        return cls(
            base=base,
            eps_values=tuple(sw["eps_values"]),
            workers=_as_int(sw["workers"], "sweep.workers"),
        )

    def to_mapping(self) -> dict:
        out = self.base.to_mapping()
        out["sweep"] = {"eps_values": list(self.eps_values), "workers": self.workers}
        return out

    def member(self, index: int) -> RunConfig:
        """Run configuration of ladder member ``index`` (0 is the largest epsilon)."""
        eps = self.eps_values[index]
        out_dir = str(Path(self.base.out_dir) / f"member-{index:02d}")
        return replace(self.base, epsilon=eps, out_dir=out_dir)


def _as_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _as_float(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


def _as_opt_float(value, name: str):
    if value is None:
        return None
    return _as_float(value, name)


def _deep_merge(base: dict, override: dict, path: str = "") -> None:
    for key, value in override.items():
        where = f"{path}.{key}" if path else str(key)
        if key not in base:
            raise ConfigError(f"unknown configuration key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where} must be a mapping")
            _deep_merge(base[key], value, where)
        else:
            base[key] = value


def parse_override(text: str) -> tuple[tuple[str, ...], object]:
    """Parse a ``key.path=value`` override; the value is read as YAML."""
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"override {text!r} is not of the form key.path=value")
    try:
        value = yaml.safe_load(raw) if raw else None
    except yaml.YAMLError as exc:
        raise ConfigError(f"override {text!r} has an unreadable value: {exc}") from exc
    return tuple(key.split(".")), value


def _apply_override(mapping: dict, path: tuple[str, ...], value) -> None:
    node = mapping
    for part in path[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"unknown configuration key {'.'.join(path)!r}")
        node = node[part]
    leaf = path[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError(f"unknown configuration key {'.'.join(path)!r}")
    if isinstance(node[leaf], dict):
        raise ConfigError(f"configuration key {'.'.join(path)!r} is not a scalar")
    node[leaf] = value


def _load_mapping(defaults: dict, path: str | None, overrides: Sequence[str]) -> dict:
    mapping = defaults
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        try:
            payload = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
        if payload is None:
            payload = {}
        if not isinstance(payload, dict):
            raise ConfigError(f"config file {path} must hold a mapping")
        _deep_merge(mapping, payload)
    for text in overrides:
        key, value = parse_override(text)
        _apply_override(mapping, key, value)
    return mapping


def load_run_config(path: str | None = None, overrides: Sequence[str] = ()) -> RunConfig:
    """Run configuration from defaults, an optional YAML file, and overrides."""
    return RunConfig.from_mapping(_load_mapping(default_run_mapping(), path, overrides))


def load_sweep_plan(path: str | None = None, overrides: Sequence[str] = ()) -> SweepPlan:
    """Sweep plan from defaults, an optional YAML file, and overrides."""
    return SweepPlan.from_mapping(
        _load_mapping(default_sweep_mapping(), path, overrides)
    )
