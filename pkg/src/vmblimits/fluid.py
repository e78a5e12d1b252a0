"""Reference solvers for the three diffusive fluid limits.

All three limits share an incompressible Navier-Stokes-Fourier core for the
bulk velocity u and temperature theta; they differ in how the charge density
n and the electromagnetic fields enter, controlled by the limit constants
(c_alpha, c_beta, c_gamma) of the scaling ladder:

  nsf  (0,0,0): u, theta, n evolve; n is passively advected and diffused,
                the fields vanish.
  nsp  (1,0,0): as nsf plus electrostatic coupling: E is slaved to n through
                the Poisson equation (E = grad inverse-Laplacian n), the
                charge is screened at rate sigma, and n E forces u.
  nsw  (1,1,1): u, theta, E, B evolve; n = div E is diagnostic, the current
                follows the algebraic Ohm law
                j = sigma (E + u x B - grad n) + n u,
                and n E + j x B forces u.

Discretization: Fourier collocation with the 2/3 mask (products of
band-limited fields are exact), Leray projection for incompressibility, and
the same two-stage second-order implicit-explicit splitting as the kinetic
solver with the diffusion (and screening) terms implicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import SpectralGrid, VectorField3, apply_dealias, leray_project, x_to_coeffs, x_to_values
from .regime import _LIMIT_CONSTANTS, PRESET_TAGS


@dataclass
class FluidLimitConfig:
    grid: SpectralGrid
    tag: str
    nu: float
    kappa: float
    sigma: float
    # nsw only: replace the Ohm current by zero, turning the field block into
    # the free Maxwell system whose energy the curl pairing conserves
    force_zero_current: bool = False

    def __post_init__(self) -> None:
        if self.tag not in PRESET_TAGS:
            raise ValueError(f"unknown limit tag {self.tag!r}")
        if min(self.nu, self.kappa, self.sigma) <= 0:
            raise ValueError("transport coefficients must be positive")
        self.c_alpha, self.c_beta, self.c_gamma = _LIMIT_CONSTANTS[self.tag]
        # The scalar nu is the (1/15)-normalized trace of the inverted stress
        # tensor; the Newtonian viscosity multiplying Delta u in the isotropic
        # momentum equation is the (1/10)-contraction, i.e. 3/2 of it.  The
        # kappa and sigma normalizations already equal the limit diffusivities.
        self.viscosity = 1.5 * self.nu


@dataclass
class FluidState:
    """Fourier coefficients of the limit-system fields.

    n is evolved for the nsf and nsp limits and equals div E for nsw; E is
    slaved to n for nsp and zero for nsf.
    """

    u: np.ndarray  # (3, *x)
    theta: np.ndarray  # (*x,)
    n: np.ndarray  # (*x,)
    E: np.ndarray  # (3, *x)
    B: np.ndarray  # (3, *x)
    time: float = 0.0

    def copy(self) -> "FluidState":
        return FluidState(
            self.u.copy(), self.theta.copy(), self.n.copy(), self.E.copy(), self.B.copy(), self.time
        )


def _scalar_product(a: np.ndarray, b: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Dealiased Fourier coefficients of the pointwise product of two fields."""
    return x_to_coeffs(x_to_values(a, grid) * x_to_values(b, grid), grid)


def _divergence(F: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    out = np.zeros(grid.x_shape, dtype=np.complex128)
    for i in range(3):
        out += 1j * grid.k3[i] * F[i]
    return out


def _curl(F: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    k = grid.k3
    out = np.empty_like(F)
    out[0] = 1j * (k[1] * F[2] - k[2] * F[1])
    out[1] = 1j * (k[2] * F[0] - k[0] * F[2])
    out[2] = 1j * (k[0] * F[1] - k[1] * F[0])
    return out


def _gradient(s: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    return np.stack([1j * grid.k3[i] * s for i in range(3)])


def _cross_values(a_vals: np.ndarray, b_vals: np.ndarray) -> np.ndarray:
    out = np.empty_like(a_vals)
    out[0] = a_vals[1] * b_vals[2] - a_vals[2] * b_vals[1]
    out[1] = a_vals[2] * b_vals[0] - a_vals[0] * b_vals[2]
    out[2] = a_vals[0] * b_vals[1] - a_vals[1] * b_vals[0]
    return out


def _leray(F: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    return leray_project(VectorField3(F, grid)).coeffs


def poisson_field(n: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Electrostatic field with div E = n and zero mean and curl."""
    ksq = grid.k_sq
    safe = np.where(ksq > 0, ksq, 1.0)
    out = np.stack([-1j * grid.k3[i] * n / safe for i in range(3)])
    zero = (slice(None),) + (0,) * grid.d_x
    out[zero] = 0.0
    return out


def ohm_current(
    u: np.ndarray, E: np.ndarray, B: np.ndarray, n: np.ndarray, cfg: FluidLimitConfig
) -> np.ndarray:
    """Algebraic current j = sigma (c_a E + c_b u x B - grad n) + n u."""
    grid = cfg.grid
    u_vals = x_to_values(u, grid)
    j = -cfg.sigma * _gradient(n, grid)
    if cfg.c_alpha:
        j += (cfg.sigma * cfg.c_alpha) * E
    if cfg.c_beta:
        uxb = _cross_values(u_vals, x_to_values(B, grid))
        j += (cfg.sigma * cfg.c_beta) * x_to_coeffs(uxb, grid)
    n_vals = x_to_values(n, grid)
    j += x_to_coeffs(n_vals * u_vals, grid)
    return j


def _explicit_rhs(state: FluidState, cfg: FluidLimitConfig) -> FluidState:
    grid = cfg.grid
    u_vals = x_to_values(state.u, grid)

    # conservative advection terms div(u q); exact for band-limited fields
    du = np.empty_like(state.u)
    for i in range(3):
        flux = x_to_coeffs(u_vals * u_vals[i], grid)
        du[i] = -_divergence(flux, grid)
    dtheta = -_divergence(x_to_coeffs(u_vals * x_to_values(state.theta, grid), grid), grid)

    dn = np.zeros_like(state.n)
    dE = np.zeros_like(state.E)
    dB = np.zeros_like(state.B)

    if cfg.tag == "nsw":
        # the diagnostic charge must track div E within the stages, not just
        # at step boundaries, or the coupling terms lose an order in time
        n = _divergence(state.E, grid)
        if cfg.force_zero_current:
            j = np.zeros_like(state.E)
        else:
            j = ohm_current(state.u, state.E, state.B, n, cfg)
        dE = _curl(state.B, grid) - j
        dB = -_curl(state.E, grid)
        force = x_to_coeffs(x_to_values(state.E, grid) * x_to_values(n, grid)[None], grid)
        force += x_to_coeffs(_cross_values(x_to_values(j, grid), x_to_values(state.B, grid)), grid)
        du += force
    elif cfg.tag == "nsp":
        E = poisson_field(state.n, grid)
        dn = -_divergence(x_to_coeffs(x_to_values(state.n, grid) * u_vals, grid), grid)
        force = x_to_coeffs(x_to_values(E, grid) * x_to_values(state.n, grid)[None], grid)
        du += force
    else:  # nsf
        dn = -_divergence(x_to_coeffs(x_to_values(state.n, grid) * u_vals, grid), grid)

    du = _leray(apply_dealias(du, grid), grid)
    return FluidState(du, apply_dealias(dtheta, grid), dn, dE, dB, 0.0)


def _implicit_factors(cfg: FluidLimitConfig) -> dict[str, np.ndarray]:
    """Per-mode decay rates of the stiff (diffusive) part, by field."""
    ksq = cfg.grid.k_sq
    rates = {
        "u": cfg.viscosity * ksq,
        "theta": cfg.kappa * ksq,
        "n": cfg.sigma * ksq,
    }
    if cfg.tag == "nsp":
        rates["n"] = cfg.sigma * (ksq + 1.0)
    if cfg.tag == "nsw":
        # charge screening acts through the Ampere current; the evolved
        # fields E, B carry no stiff term
        rates["n"] = np.zeros_like(ksq)
    return rates


_ARS_GAMMA = 1.0 - 1.0 / math.sqrt(2.0)
_ARS_DELTA = 1.0 - 1.0 / (2.0 * _ARS_GAMMA)


def step_fluid(state: FluidState, dt: float, cfg: FluidLimitConfig) -> FluidState:
    """One step of the two-stage second-order implicit-explicit scheme.

    The diffusion (and, for nsp, screening) terms are integrated implicitly
    per Fourier mode; everything else is explicit.  The scheme is stiffly
    accurate, so the returned state is the final stage.
    """
    rates = _implicit_factors(cfg)
    gam, delta = _ARS_GAMMA, _ARS_DELTA

    def implicit_solve(parts: dict[str, np.ndarray], a: float) -> dict[str, np.ndarray]:
        return {
            "u": parts["u"] / (1.0 + a * rates["u"]),
            "theta": parts["theta"] / (1.0 + a * rates["theta"]),
            "n": parts["n"] / (1.0 + a * rates["n"]),
            "E": parts["E"],
            "B": parts["B"],
        }

    def as_parts(s: FluidState) -> dict[str, np.ndarray]:
        return {"u": s.u, "theta": s.theta, "n": s.n, "E": s.E, "B": s.B}

    def as_state(parts: dict[str, np.ndarray], t: float) -> FluidState:
        return FluidState(parts["u"], parts["theta"], parts["n"], parts["E"], parts["B"], t)

    def stiff_of(sol: dict[str, np.ndarray], rhs: dict[str, np.ndarray], a: float):
        return {key: (sol[key] - rhs[key]) / a for key in sol}

    y0 = as_parts(state)
    fe0 = as_parts(_explicit_rhs(state, cfg))

    rhs1 = {k: y0[k] + dt * gam * fe0[k] for k in y0}
    y1 = implicit_solve(rhs1, dt * gam)
    fi1 = stiff_of(y1, rhs1, dt * gam)
    fe1 = as_parts(_explicit_rhs(as_state(y1, state.time), cfg))

    rhs2 = {
        k: y0[k] + dt * (delta * fe0[k] + (1.0 - delta) * fe1[k] + (1.0 - gam) * fi1[k])
        for k in y0
    }
    y2 = implicit_solve(rhs2, dt * gam)

    out = as_state(y2, state.time + dt)
    if cfg.tag == "nsw":
        out.n = _divergence(out.E, cfg.grid)
    return out


def stable_dt_fluid(cfg: FluidLimitConfig, safety: float = 0.4) -> float:
    """Step bound from the explicit wave terms (nsw) and a generic cap."""
    k_max = (2.0 * math.pi / cfg.grid.L_x) * (cfg.grid.N_x // 3) * cfg.grid.d_x
    if cfg.tag == "nsw":
        return safety * min(1.0 / k_max, 1.0 / max(cfg.sigma, 1.0))
    return safety / max(cfg.sigma, 1.0)


def run_fluid(
    state: FluidState,
    cfg: FluidLimitConfig,
    t_final: float,
    dt: float,
    record_dt: float | None = None,
    observer: Callable[[FluidState, int], None] | None = None,
) -> FluidState:
    """Integrate the limit system, reporting at a fixed record cadence."""
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    seg = record_dt if record_dt is not None else t_final
    state = state.copy()
    if observer is not None:
        observer(state, 0)
    t_elapsed = 0.0
    record_index = 0
    while t_elapsed < t_final - 1e-12 * t_final:
        seg_len = min(seg, t_final - t_elapsed)
        n_sub = max(1, math.ceil(seg_len / dt - 1e-12))
        h = seg_len / n_sub
        # a diverging state overflows inside the arithmetic before the finite
        # check can catch it; the check is the reporting channel, not warnings
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(n_sub):
                state = step_fluid(state, h, cfg)
        t_elapsed += seg_len
        state.time = t_elapsed
        with np.errstate(over="ignore", invalid="ignore"):
            probe = np.sum(np.abs(state.u) ** 2) + np.sum(np.abs(state.E) ** 2)
        if not np.isfinite(probe):
            raise FloatingPointError(f"fluid state became non-finite at t = {state.time:.6g}")
        record_index += 1
        if observer is not None:
            observer(state, record_index)
    return state


def _xint(a: np.ndarray, b: np.ndarray, grid: SpectralGrid) -> float:
    """integral a b dx for real fields given as Fourier coefficients."""
    return float(np.real(np.vdot(b, a)) * grid.volume)


def energy_balance(state: FluidState, cfg: FluidLimitConfig) -> dict[str, float]:
    """Quadratic energies and instantaneous dissipation rates of the limit system.

    The thermal weight 5/4 is the one inherited from the kinetic energy of the
    hydrodynamic projection under the Boussinesq relation rho = -theta; with
    it, d/dt thermal = -dissipation_thermal on a pure heat flow.
    """
    grid = cfg.grid
    ksq = grid.k_sq
    kinetic = 0.5 * _xint(state.u, state.u, grid)
    thermal = 1.25 * _xint(state.theta, state.theta, grid)
    field = 0.5 * (_xint(state.E, state.E, grid) + _xint(state.B, state.B, grid))
    charge = 0.5 * _xint(state.n, state.n, grid)
    grad_u = float(np.sum(ksq[None] * np.abs(state.u) ** 2) * grid.volume)
    grad_theta = float(np.sum(ksq * np.abs(state.theta) ** 2) * grid.volume)
    # screening adds the zeroth-order sigma n^2 term for nsp; for nsw the
    # charge is diagnostic and dissipates through the Ohm term instead
    if cfg.tag == "nsw":
        grad_n = 0.0
    else:
        weight = ksq + 1.0 if cfg.tag == "nsp" else ksq
        grad_n = float(np.sum(weight * np.abs(state.n) ** 2) * grid.volume)
    out = {
        "kinetic": kinetic,
        "thermal": thermal,
        "field": field,
        "charge": charge,
        "dissipation_viscous": cfg.viscosity * grad_u,
        "dissipation_thermal": 2.5 * cfg.kappa * grad_theta,
        "dissipation_charge": cfg.sigma * grad_n,
    }
    if cfg.tag == "nsw":
        if cfg.force_zero_current:
            out["dissipation_ohmic"] = 0.0
        else:
            j = ohm_current(state.u, state.E, state.B, state.n, cfg)
            convective = _scalar_product(state.n, state.u, grid)
            resid = j - convective
            out["dissipation_ohmic"] = _xint(resid, resid, grid) / cfg.sigma
        out["total"] = kinetic + thermal + field
    else:
        out["dissipation_ohmic"] = 0.0
        out["total"] = kinetic + thermal + charge
    return out
