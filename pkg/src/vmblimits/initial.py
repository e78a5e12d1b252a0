"""Initial states: moment perturbations with the structural constraints applied.

Initial data is specified as sparse Fourier amplitudes for the low-order
moments (density, velocity, temperature of the neutral part; charge, current,
and electromagnetic fields of the charged part).  The builder turns them into
a consistent kinetic state:

* density-like perturbations are made mean-free,
* the magnetic field is made divergence-free and mean-free,
* the gradient part of the electric field is replaced by the unique one
  solving the discrete Gauss constraint for the given charge,
* the mean velocity and mean temperature are chosen so that the total
  momentum and total energy invariants start at exactly zero,
* with well_prepared=True the state is pushed onto the fluid manifold:
  divergence-free velocity, opposite density and temperature perturbations,
  and a current slaved to the leading-order Ohm balance.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .collisions import from_moments
from .grid import (
    DistributionField,
    SpectralGrid,
    VectorField3,
    apply_dealias,
    helmholtz_decompose,
    leray_project,
    x_to_coeffs,
    x_to_values,
)
from .regime import ScalingRegime

ModeKey = int | tuple[int, ...]
ModeDict = dict


@dataclass
class InitialData:
    """Sparse Fourier amplitudes per moment.

    Scalar entries map a wavenumber (an int for one spatial dimension, else a
    tuple) to a complex amplitude; vector entries map to length-3 sequences.
    The conjugate mode is filled in automatically, so only one of {k, -k}
    should be given.
    """

    rho: ModeDict = dc_field(default_factory=dict)
    u: ModeDict = dc_field(default_factory=dict)
    theta: ModeDict = dc_field(default_factory=dict)
    n: ModeDict = dc_field(default_factory=dict)
    j: ModeDict = dc_field(default_factory=dict)
    E: ModeDict = dc_field(default_factory=dict)
    B: ModeDict = dc_field(default_factory=dict)
    well_prepared: bool = True


def _normalize_key(key: ModeKey, d_x: int) -> tuple[int, ...]:
    if isinstance(key, (int, np.integer)):
        key = (int(key),)
    key = tuple(int(k) for k in key)
    if len(key) != d_x:
        raise ValueError(f"mode key {key} does not match spatial dimension {d_x}")
    return key


def _scalar_array(modes: ModeDict, grid: SpectralGrid) -> np.ndarray:
    out = np.zeros(grid.x_shape, dtype=np.complex128)
    for key, value in modes.items():
        idx = _normalize_key(key, grid.d_x)
        if any(abs(k) > grid.N_x // 3 for k in idx):
            raise ValueError(f"mode {idx} lies outside the resolved band")
        out[idx] += complex(value)
        neg = tuple(-k for k in idx)
        if neg != idx:
            out[neg] += np.conj(complex(value))
    zero = (0,) * grid.d_x
    out[zero] = out[zero].real
    return out


def _vector_array(modes: ModeDict, grid: SpectralGrid) -> np.ndarray:
    out = np.zeros((3,) + grid.x_shape, dtype=np.complex128)
    for key, value in modes.items():
        idx = _normalize_key(key, grid.d_x)
        if any(abs(k) > grid.N_x // 3 for k in idx):
            raise ValueError(f"mode {idx} lies outside the resolved band")
        vec = np.asarray(value, dtype=np.complex128)
        if vec.shape != (3,):
            raise ValueError("vector amplitudes must have three components")
        sl = (slice(None),) + idx
        out[sl] += vec
        neg = tuple(-k for k in idx)
        if neg != idx:
            out[(slice(None),) + neg] += np.conj(vec)
    zero = (slice(None),) + (0,) * grid.d_x
    out[zero] = out[zero].real
    return out


def _gauss_correct_E(
    E: np.ndarray, n: np.ndarray, grid: SpectralGrid, coupling: float
) -> np.ndarray:
    """Replace the gradient part of E by the solution of div E = coupling * n."""
    field = VectorField3(E.copy(), grid)
    _, div_free, mean = helmholtz_decompose(field)
    ksq = grid.k_sq
    safe = np.where(ksq > 0, ksq, 1.0)
    out = div_free.coeffs.copy()
    for i in range(3):
        out[i] += -1j * grid.k3[i] * coupling * n / safe
    zero = (slice(None),) + (0,) * grid.d_x
    out[zero] = mean
    return out


def _convolve(a: np.ndarray, b: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Fourier coefficients of the pointwise product of two band-limited fields."""
    va = x_to_values(a, grid)
    vb = x_to_values(b, grid)
    return x_to_coeffs(va * vb, grid)


def _ohm_current_modes(
    n: np.ndarray,
    u: np.ndarray,
    E: np.ndarray,
    B: np.ndarray,
    grid: SpectralGrid,
    regime: ScalingRegime,
    sigma: float,
) -> np.ndarray:
    """Leading-order slaved current sigma(alpha_eff E + beta u x B - grad n) + n u."""
    out = np.empty_like(E)
    u_cross_B = np.empty_like(E)
    u_cross_B[0] = _convolve(u[1], B[2], grid) - _convolve(u[2], B[1], grid)
    u_cross_B[1] = _convolve(u[2], B[0], grid) - _convolve(u[0], B[2], grid)
    u_cross_B[2] = _convolve(u[0], B[1], grid) - _convolve(u[1], B[0], grid)
    for i in range(3):
        grad_n = 1j * grid.k3[i] * n
        out[i] = (
            sigma * (regime.alpha_eff * E[i] + regime.beta_eff * u_cross_B[i] - grad_n)
            + _convolve(n, u[i], grid)
        )
    return out


def build_state(
    data: InitialData,
    grid: SpectralGrid,
    regime: ScalingRegime,
    sigma: float = 1.0,
):
    """Assemble (f, g, E, B) coefficient fields from sparse moment data.

    sigma is the conductivity used by the well-prepared current; pass the
    value from the active collision backend's transport coefficients.
    """
    rho = _scalar_array(data.rho, grid)
    theta = _scalar_array(data.theta, grid)
    n = _scalar_array(data.n, grid)
    u = _vector_array(data.u, grid)
    j = _vector_array(data.j, grid)
    E = _vector_array(data.E, grid)
    B = _vector_array(data.B, grid)

    zero = (0,) * grid.d_x
    rho[zero] = 0.0
    n[zero] = 0.0

    # magnetic field: mean-free and divergence-free
    _, b_free, _ = helmholtz_decompose(VectorField3(B, grid))
    B = b_free.coeffs

    E = _gauss_correct_E(E, n, grid, regime.alpha / regime.epsilon)

    if data.well_prepared:
        u = leray_project(VectorField3(u, grid)).coeffs
        rho = -theta.copy()
        rho[zero] = 0.0

    # zero total momentum invariant: mean u cancels gamma * mean of E x B
    poynting = np.empty(3, dtype=np.complex128)
    poynting[0] = np.sum(E[1] * np.conj(B[2]) - E[2] * np.conj(B[1]))
    poynting[1] = np.sum(E[2] * np.conj(B[0]) - E[0] * np.conj(B[2]))
    poynting[2] = np.sum(E[0] * np.conj(B[1]) - E[1] * np.conj(B[0]))
    u_mean = -regime.gamma * poynting.real
    for i in range(3):
        u[(i,) + zero] = u_mean[i]

    # zero total energy invariant: mean theta cancels the field energy
    field_energy = float(np.sum(np.abs(E) ** 2 + np.abs(B) ** 2))
    theta[zero] = -regime.epsilon * field_energy / 3.0

    if data.well_prepared:
        j = regime.epsilon * _ohm_current_modes(n, u, E, B, grid, regime, sigma)

    f = from_moments(grid, rho, u, theta)
    g = DistributionField.zeros(grid)
    g.coeffs[..., 0, 0, 0] = n
    g.coeffs[..., 1, 0, 0] = j[0]
    g.coeffs[..., 0, 1, 0] = j[1]
    g.coeffs[..., 0, 0, 1] = j[2]
    f = DistributionField(apply_dealias(f.coeffs, grid), grid)
    g = DistributionField(apply_dealias(g.coeffs, grid), grid)
    E_field = VectorField3(apply_dealias(E, grid), grid)
    B_field = VectorField3(apply_dealias(B, grid), grid)
    return f, g, E_field, B_field


def build_fluid_state(data: InitialData, grid: SpectralGrid, tag: str):
    """Assemble a limit-system state carrying the same moment content.

    The velocity is divergence-free and the density-like fields mean-free,
    matching what the kinetic builder produces at leading order.  The
    electromagnetic part follows the structure of the requested limit:
    absent for "nsf", electrostatic and slaved to the charge for "nsp",
    dynamical with the unit-coupling Gauss constraint for "nsw".
    """
    from .fluid import FluidState

    if tag not in ("nsf", "nsp", "nsw"):
        raise ValueError(f"unknown limit tag {tag!r}")
    theta = _scalar_array(data.theta, grid)
    n = _scalar_array(data.n, grid)
    u = leray_project(VectorField3(_vector_array(data.u, grid), grid)).coeffs
    zero = (0,) * grid.d_x
    theta[zero] = 0.0
    n[zero] = 0.0

    E = np.zeros((3,) + grid.x_shape, dtype=np.complex128)
    B = np.zeros_like(E)
    if tag == "nsp":
        from .fluid import poisson_field

        E = poisson_field(n, grid)
    elif tag == "nsw":
        _, b_free, _ = helmholtz_decompose(
            VectorField3(_vector_array(data.B, grid), grid)
        )
        B = b_free.coeffs
        E = _gauss_correct_E(_vector_array(data.E, grid), n, grid, 1.0)
        # zero total momentum: mean u cancels the mean of E x B
        poynting = np.empty(3, dtype=np.complex128)
        poynting[0] = np.sum(E[1] * np.conj(B[2]) - E[2] * np.conj(B[1]))
        poynting[1] = np.sum(E[2] * np.conj(B[0]) - E[0] * np.conj(B[2]))
        poynting[2] = np.sum(E[0] * np.conj(B[1]) - E[1] * np.conj(B[0]))
        for i in range(3):
            u[(i,) + zero] = -poynting[i].real

    if tag == "nsw":
        n_out = np.zeros(grid.x_shape, dtype=np.complex128)
        for i in range(3):
            n_out += 1j * grid.k3[i] * E[i]
    else:
        n_out = n
    return FluidState(
        u=apply_dealias(u, grid),
        theta=apply_dealias(theta, grid),
        n=apply_dealias(n_out, grid),
        E=apply_dealias(E, grid),
        B=apply_dealias(B, grid),
        time=0.0,
    )
