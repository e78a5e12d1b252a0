"""Measurement functionals for kinetic runs.

Everything here is a pure function of states: the five conserved integrals,
the instant-energy and dissipation functionals with their constituent parts
(electromagnetic cross terms, the epsilon-weighted x-v mixed term, the
velocity-derivative ladder), the residual of the current-damping equation,
residuals of the limit relations (Ohm's law, Boussinesq, moment comparisons
against a fluid reference), and log-log convergence-rate fits for sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .collisions import (
    CollisionBackend,
    gamma_Lsf,
    kernel_part_L,
    kernel_part_sf,
    moments,
    transport_coefficients,
)
from .fluid import FluidState
from .grid import (
    DistributionField,
    SpectralGrid,
    VectorField3,
    _x_weight,
    leray_project,
    sobolev_norm,
    sobolev_norm_vector,
    x_to_coeffs,
    x_to_values,
)
from . import hermite
from .integrator import KineticState, gauss_residual_field
from .regime import ScalingRegime

_SQ2 = math.sqrt(2.0)


# --- moment bundles ----------------------------------------------------------


@dataclass
class MomentSet:
    """Macroscopic fields of a kinetic state, as spatial Fourier data."""

    rho: np.ndarray
    u: np.ndarray  # (3, *x)
    theta: np.ndarray
    n: np.ndarray
    j: np.ndarray  # (3, *x)
    jtilde: np.ndarray  # (3, *x)


def moment_set(state: KineticState, backend: CollisionBackend) -> MomentSet:
    mf = moments(state.f)
    mg = moments(state.g)
    lam1 = backend.rate_at(1)
    return MomentSet(
        rho=mf.density, u=mf.flux, theta=mf.theta, n=mg.density, j=mg.flux, jtilde=mg.flux / lam1
    )


def _zero_index(grid: SpectralGrid) -> tuple[int, ...]:
    return (0,) * grid.d_x


def _l2_norm(arr: np.ndarray, grid: SpectralGrid) -> float:
    return math.sqrt(float(np.sum(np.abs(arr) ** 2)) * grid.volume)


def _hs_norm(arr: np.ndarray, grid: SpectralGrid, s: int) -> float:
    """H^s_x norm of a scalar or leading-stacked Fourier field."""
    w = _x_weight(grid, s)
    p = np.abs(arr) ** 2
    while p.ndim > grid.d_x:
        p = p.sum(axis=0)
    return math.sqrt(float(np.sum(w * p)) * grid.volume)


# --- conserved integrals -----------------------------------------------------

CONSERVED_NAMES = (
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


def conserved_quantities(state: KineticState, regime: ScalingRegime) -> dict[str, float]:
    """The five global integrals preserved by the flow.

    Momentum and magnetic flux are vector valued, so nine scalars come back:
    integral of (u + gamma E x B), of (theta + eps (|E|^2 + |B|^2)/3), of rho,
    of n, and of B.
    """
    grid = state.grid
    vol = grid.volume
    zero = _zero_index(grid)
    mf = moments(state.f)
    mg = moments(state.g)
    e = state.E.coeffs
    b = state.B.coeffs

    cross = np.empty(3)
    cross[0] = float(np.sum(np.real(e[1] * np.conj(b[2]) - e[2] * np.conj(b[1]))))
    cross[1] = float(np.sum(np.real(e[2] * np.conj(b[0]) - e[0] * np.conj(b[2]))))
    cross[2] = float(np.sum(np.real(e[0] * np.conj(b[1]) - e[1] * np.conj(b[0]))))
    field_sq = float(np.sum(np.abs(e) ** 2 + np.abs(b) ** 2))

    out = {}
    for i, name in enumerate(CONSERVED_NAMES[:3]):
        out[name] = vol * (float(np.real(mf.flux[i][zero])) + regime.gamma * cross[i])
    out["theta_field_energy"] = vol * (
        float(np.real(mf.theta[zero])) + regime.epsilon * field_sq / 3.0
    )
    out["mass"] = vol * float(np.real(mf.density[zero]))
    out["charge"] = vol * float(np.real(mg.density[zero]))
    for i, name in enumerate(CONSERVED_NAMES[6:]):
        out[name] = vol * float(np.real(b[i][zero]))
    return out


# --- energy and dissipation functionals -------------------------------------


@dataclass(frozen=True)
class EnergyWeights:
    """Weights of the composite Lyapunov functional.

    b5 scales the plain H^s_x bundle, b4 the electromagnetic and mixed cross
    terms, b_v the velocity-derivative ladder whose lower rungs carry the
    ladder factor.  The defaults keep the composite functional positive and
    equivalent to the instant energy within a small factor on small data.
    """

    b5: float = 1.0
    b4: float = 0.05
    b_v: float = 1.0
    ladder: float = 8.0 / 3.0


def _curl_hat(F: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    k = grid.k3
    out = np.empty_like(F)
    out[0] = 1j * (k[1] * F[2] - k[2] * F[1])
    out[1] = 1j * (k[2] * F[0] - k[0] * F[2])
    out[2] = 1j * (k[0] * F[1] - k[1] * F[0])
    return out


def _level_quad(a: np.ndarray, b: np.ndarray, grid: SpectralGrid, level: int) -> float:
    """Re <del^level a, del^level b> with the homogeneous |k|^(2 level) weight."""
    w = grid.k_sq**level
    p = np.real(a * np.conj(b))
    while p.ndim > grid.d_x:
        p = p.sum(axis=0)
    return float(np.sum(w * p)) * grid.volume


def _mixed_pair(coeffs: np.ndarray, grid: SpectralGrid, level: int) -> float:
    """Re sum_a <d_x_a del^level h, d_v_a del^level h> over the three directions."""
    total = 0.0
    w = grid.k_sq**level
    for a in range(3):
        ka = grid.k3[a]
        if not np.any(ka):
            continue
        dxa = 1j * ka.reshape(ka.shape + (1, 1, 1)) * coeffs
        dva = hermite.ddt(coeffs, axis=-3 + a)
        p = np.real(dxa * np.conj(dva)).sum(axis=(-1, -2, -3))
        total += float(np.sum(w * p)) * grid.volume
    return total


def _grad_v_mixed_sq(f: DistributionField, s: int) -> float:
    """Squared mixed Sobolev norm of the velocity gradient, summed over directions."""
    total = 0.0
    for a in range(3):
        da = DistributionField(hermite.ddt(f.coeffs, axis=-3 + a), f.grid)
        total += sobolev_norm(da, s, "mixed") ** 2
    return total


def energy_functionals(
    state: KineticState,
    regime: ScalingRegime,
    backend: CollisionBackend,
    s: int = 3,
    weights: EnergyWeights = EnergyWeights(),
) -> dict[str, float]:
    """Instant energy, composite functional with its parts, dissipation bundle.

    Returns a dict with keys: h_s (instant energy), hs_x and v_part (its two
    pieces), em_energy, mixed_term, v_ladder (the composite's constituents),
    h_tilde (their weighted sum), and the dissipation entries d_lambda,
    d_field, d_perp.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    grid = state.grid
    eps = regime.epsilon
    f, g = state.f, state.g
    E, B = state.E, state.B

    hs_x = (
        sobolev_norm(f, s, "x") ** 2
        + sobolev_norm(g, s, "x") ** 2
        + sobolev_norm_vector(E, s) ** 2
        + sobolev_norm_vector(B, s) ** 2
    )
    v_part = eps * eps * (_grad_v_mixed_sq(f, s - 1) + _grad_v_mixed_sq(g, s - 1))
    h_s = hs_x + v_part

    sigma = transport_coefficients(backend)["sigma"]
    jtilde = moments(state.g).flux / backend.rate_at(1)
    curl_e = _curl_hat(E.coeffs, grid)
    curl_b = _curl_hat(B.coeffs, grid)
    curl_j = _curl_hat(jtilde, grid)
    em = 0.0
    for k in range(s - 1):
        em += _level_quad(curl_e, curl_e, grid, k) + _level_quad(curl_b, curl_b, grid, k)
        em -= 2.0 * regime.alpha * _level_quad(curl_j, curl_e, grid, k)
        em -= (
            regime.gamma
            * regime.alpha**2
            * sigma
            / (4.0 * eps * eps)
            * _level_quad(E.coeffs, curl_b, grid, k)
        )
    em += _level_quad(E.coeffs, E.coeffs, grid, 0) + _level_quad(B.coeffs, B.coeffs, grid, 0)
    em -= 2.0 * regime.alpha * _level_quad(jtilde, E.coeffs, grid, 0)

    mixed = 0.0
    for k in range(1, s + 1):
        mixed += _mixed_pair(f.coeffs, grid, k - 1) + _mixed_pair(g.coeffs, grid, k - 1)
    mixed *= eps

    ladder_sum = 0.0
    for m in range(1, s):
        ladder_sum += _grad_v_mixed_sq(f, m - 1) + _grad_v_mixed_sq(g, m - 1)
    v_ladder = eps * eps * (weights.ladder * ladder_sum) + v_part

    h_tilde = weights.b5 * hs_x + weights.b4 * (em + mixed) + weights.b_v * v_ladder

    f_perp = DistributionField(f.coeffs - kernel_part_L(f.coeffs), grid)
    g_perp = DistributionField(g.coeffs - kernel_part_sf(g.coeffs), grid)
    alpha_sq = (regime.alpha / eps) ** 2
    d_lambda = sobolev_norm(f, s, "lambda") ** 2 + sobolev_norm(g, s, "lambda") ** 2
    d_field = alpha_sq * (sobolev_norm_vector(E, s - 1) ** 2 + sobolev_norm_vector(B, s - 1) ** 2)
    d_perp = (
        sobolev_norm(f_perp, s, "lambda-x") ** 2 + sobolev_norm(g_perp, s, "lambda-x") ** 2
    ) / (eps * eps)

    return {
        "h_s": h_s,
        "hs_x": hs_x,
        "v_part": v_part,
        "em_energy": em,
        "mixed_term": mixed,
        "v_ladder": v_ladder,
        "h_tilde": h_tilde,
        "d_lambda": d_lambda,
        "d_field": d_field,
        "d_perp": d_perp,
    }


# --- current-damping balance -------------------------------------------------


def _second_moment_tensor(g: DistributionField) -> np.ndarray:
    """<v_i v_j g>_v as a (3, 3, *x) array of Fourier coefficients."""
    c = g.coeffs
    grid = g.grid
    out = np.empty((3, 3) + grid.x_shape, dtype=np.complex128)
    density = c[..., 0, 0, 0]
    diag = [c[..., 2, 0, 0], c[..., 0, 2, 0], c[..., 0, 0, 2]]
    pairs = {(0, 1): c[..., 1, 1, 0], (0, 2): c[..., 1, 0, 1], (1, 2): c[..., 0, 1, 1]}
    for i in range(3):
        for j in range(3):
            if i == j:
                out[i, j] = _SQ2 * diag[i] + density
            else:
                out[i, j] = pairs[(min(i, j), max(i, j))]
    return out


def _dealiased_product(a: np.ndarray, b: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    return x_to_coeffs(x_to_values(a, grid) * x_to_values(b, grid), grid)


def jtilde_balance(
    prev: KineticState,
    state: KineticState,
    regime: ScalingRegime,
    backend: CollisionBackend,
    dt: float,
) -> tuple[np.ndarray, float]:
    """Residual of the current-damping relation between two consecutive states.

    The time derivative of the weighted current is approximated by a backward
    difference, every other term is evaluated at the later state, and the
    closure residual field plus its L2 norm come back.  On an exact solution
    the residual is pure first-order time-discretization error.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid = state.grid
    eps = regime.epsilon
    lam1 = backend.rate_at(1)
    sigma = transport_coefficients(backend)["sigma"]

    jt_new = moments(state.g).flux / lam1
    jt_old = moments(prev.g).flux / lam1
    mg = moments(state.g)
    mf = moments(state.f)

    tensor = _second_moment_tensor(state.g) / lam1
    div_t = np.zeros((3,) + grid.x_shape, dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            div_t[i] += 1j * grid.k3[j] * tensor[i, j]

    e = state.E.coeffs
    b = state.B.coeffs
    u_vals = x_to_values(mf.flux, grid)
    b_vals = x_to_values(b, grid)
    uxb = np.empty_like(u_vals)
    uxb[0] = u_vals[1] * b_vals[2] - u_vals[2] * b_vals[1]
    uxb[1] = u_vals[2] * b_vals[0] - u_vals[0] * b_vals[2]
    uxb[2] = u_vals[0] * b_vals[1] - u_vals[1] * b_vals[0]
    source = (regime.alpha / eps) * _dealiased_product(mf.density, e, grid)
    source += (regime.beta / eps) * x_to_coeffs(uxb, grid)
    source /= lam1
    source += moments(gamma_Lsf(state.g, state.f)).flux / (eps * lam1)

    residual = (jt_new - jt_old) / dt
    residual += div_t / eps
    residual -= sigma * regime.alpha / (eps * eps) * e
    residual += mg.flux / (eps * eps)
    residual -= source
    return residual, _l2_norm(residual, grid)


# --- limit-relation residuals ------------------------------------------------


def ohm_residual(
    state: KineticState,
    regime: ScalingRegime,
    backend: CollisionBackend,
    coeffs: dict[str, float],
) -> float:
    """L2 misfit of the finite-epsilon Ohm law for the scaled current j/eps."""
    grid = state.grid
    mf = moments(state.f)
    mg = moments(state.g)
    sigma = coeffs["sigma"]
    e = state.E.coeffs
    b = state.B.coeffs
    u_vals = x_to_values(mf.flux, grid)
    b_vals = x_to_values(b, grid)
    uxb = np.empty_like(u_vals)
    uxb[0] = u_vals[1] * b_vals[2] - u_vals[2] * b_vals[1]
    uxb[1] = u_vals[2] * b_vals[0] - u_vals[0] * b_vals[2]
    uxb[2] = u_vals[0] * b_vals[1] - u_vals[1] * b_vals[0]
    grad_n = np.stack([1j * grid.k3[i] * mg.density for i in range(3)])
    law = sigma * (
        regime.alpha_eff * e + regime.beta_eff * x_to_coeffs(uxb, grid) - grad_n
    ) + _dealiased_product(mg.density, mf.flux, grid)
    return _l2_norm(mg.flux / regime.epsilon - law, grid)


def limit_residuals(
    state: KineticState,
    fluid: FluidState | None,
    regime: ScalingRegime,
    backend: CollisionBackend,
    coeffs: dict[str, float],
    s: int = 3,
) -> dict[str, float]:
    """Residuals of the limit relations, in L2 and H^(s-1).

    The kinetic-only entries (Ohm, incompressibility, Boussinesq) are always
    present; when a fluid reference state is given, the moment and field
    comparison errors are added, with the velocity compared after Leray
    projection and the temperature through the combination
    (3/5) theta - (2/5) rho.
    """
    grid = state.grid
    mf = moments(state.f)
    mg = moments(state.g)

    div_u = np.zeros(grid.x_shape, dtype=np.complex128)
    for i in range(3):
        div_u += 1j * grid.k3[i] * mf.flux[i]
    # the density-temperature relation constrains fluctuations; the theta mean
    # is pinned by the energy invariant instead, so it is excluded here
    bous = mf.density + mf.theta
    bous[_zero_index(grid)] = 0.0

    out = {
        "ohm_l2": ohm_residual(state, regime, backend, coeffs),
        "div_u_l2": _l2_norm(div_u, grid),
        "div_u_hs": _hs_norm(div_u, grid, s - 1),
        "boussinesq_l2": _l2_norm(bous, grid),
        "boussinesq_hs": _hs_norm(bous, grid, s - 1),
    }
    if fluid is None:
        return out

    u_proj = leray_project(VectorField3(mf.flux.copy(), grid)).coeffs
    theta_combo = 0.6 * mf.theta - 0.4 * mf.density
    comparisons = {
        "u": u_proj - fluid.u,
        "theta": theta_combo - fluid.theta,
        "n": mg.density - fluid.n,
        "E": state.E.coeffs - fluid.E,
        "B": state.B.coeffs - fluid.B,
    }
    for name, diff in comparisons.items():
        out[f"{name}_l2"] = _l2_norm(diff, grid)
        out[f"{name}_hs"] = _hs_norm(diff, grid, s - 1)
    return out


# --- convergence fits --------------------------------------------------------


@dataclass
class ConvergenceReport:
    """Per-quantity error tables over an epsilon ladder with fitted orders."""

    eps: tuple[float, ...]
    errors: dict[str, tuple[float, ...]]
    orders: dict[str, float] = field(default_factory=dict)
    fit_residuals: dict[str, float] = field(default_factory=dict)


def fit_convergence(eps_values: list[float], errors: dict[str, list[float]]) -> ConvergenceReport:
    """Least-squares order fit of log error against log epsilon.

    Identical errors across the ladder give order zero with zero residual;
    non-finite or non-positive errors disqualify a quantity (order NaN).
    """
    eps_arr = np.asarray(eps_values, dtype=float)
    if eps_arr.ndim != 1 or len(eps_arr) < 3:
        raise ValueError("need at least three epsilon values")
    if np.any(eps_arr <= 0):
        raise ValueError("epsilon values must be positive")
    report = ConvergenceReport(eps=tuple(eps_arr), errors={})
    log_eps = np.log(eps_arr)
    spread = float(np.ptp(log_eps))
    for name, errs in errors.items():
        err_arr = np.asarray(errs, dtype=float)
        if err_arr.shape != eps_arr.shape:
            raise ValueError(f"error table for {name!r} does not match the ladder")
        report.errors[name] = tuple(err_arr)
        if not np.all(np.isfinite(err_arr)) or np.any(err_arr <= 0):
            report.orders[name] = math.nan
            report.fit_residuals[name] = math.nan
            continue
        log_err = np.log(err_arr)
        if spread == 0.0 or float(np.ptp(log_err)) == 0.0:
            report.orders[name] = 0.0
            report.fit_residuals[name] = 0.0
            continue
        slope, intercept = np.polyfit(log_eps, log_err, 1)
        fit = slope * log_eps + intercept
        report.orders[name] = float(slope)
        report.fit_residuals[name] = float(np.sqrt(np.mean((log_err - fit) ** 2)))
    return report


# --- per-record bundle -------------------------------------------------------

RECORD_COLUMNS = (
    "t",
    *CONSERVED_NAMES,
    "h_s",
    "h_tilde",
    "em_energy",
    "mixed_term",
    "v_ladder",
    "d_lambda",
    "d_field",
    "d_perp",
    "gauss_e",
    "gauss_b",
    "ohm_residual",
    "boussinesq",
    "div_u",
    "jtilde_residual",
)


@dataclass
class DiagnosticRecord:
    """One row of the run-level diagnostics table, in fixed column order."""

    values: dict[str, float]

    def row(self) -> list[float]:
        return [self.values[name] for name in RECORD_COLUMNS]


def diagnostic_record(
    state: KineticState,
    regime: ScalingRegime,
    backend: CollisionBackend,
    prev: KineticState | None = None,
    dt: float | None = None,
    s: int = 3,
    weights: EnergyWeights = EnergyWeights(),
) -> DiagnosticRecord:
    """Evaluate every per-record diagnostic on one state.

    The damping-balance residual needs the previous recorded state and the
    time between them; without those it is reported as NaN.
    """
    grid = state.grid
    coeffs = transport_coefficients(backend)
    values: dict[str, float] = {"t": state.time}
    values.update(conserved_quantities(state, regime))
    energies = energy_functionals(state, regime, backend, s=s, weights=weights)
    for key in ("h_s", "h_tilde", "em_energy", "mixed_term", "v_ladder", "d_lambda", "d_field", "d_perp"):
        values[key] = energies[key]

    values["gauss_e"] = _l2_norm(gauss_residual_field(state, regime), grid)
    div_b = np.zeros(grid.x_shape, dtype=np.complex128)
    for i in range(3):
        div_b += 1j * grid.k3[i] * state.B.coeffs[i]
    values["gauss_b"] = _l2_norm(div_b, grid)

    residuals = limit_residuals(state, None, regime, backend, coeffs, s=s)
    values["ohm_residual"] = residuals["ohm_l2"]
    values["boussinesq"] = residuals["boussinesq_l2"]
    values["div_u"] = residuals["div_u_l2"]

    if prev is not None and dt is not None:
        values["jtilde_residual"] = jtilde_balance(prev, state, regime, backend, dt)[1]
    else:
        values["jtilde_residual"] = math.nan
    return DiagnosticRecord(values)
