"""Linearized collision operators, their inverses, and the bilinear remainder.

Two self-adjoint positive-semidefinite operators act on the velocity part of
the state:

* the hydrodynamic operator, with five-dimensional kernel
  span{1, v_1, v_2, v_3, |v|^2} (mass, momentum, energy of the perturbation),
* the charge operator, with one-dimensional kernel span{1}.

Both are diagonal on total Hermite degree shells after the kernel projection
is removed, with a per-degree relaxation rate.  The "bgk" backend uses unit
rate on every non-kernel component; the "spectral-diagonal" backend uses a
degree-dependent rate (default: rate n on degree n), which changes the
transport coefficients while keeping the same kernel and symmetry structure.

The bilinear remainder of the quadratic collision term is modelled as the
non-kernel part of the pointwise product of the two arguments, evaluated by
collocation: spatial products on the native grid (exact for band-limited
states under the 2/3 mask), velocity products on a Gauss-Hermite tensor grid
wide enough for polynomial exactness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import hermite
from .grid import (
    DistributionField,
    SpectralGrid,
    apply_dealias,
    inner_product,
)


class KernelComponentError(ValueError):
    """Raised when an inverse is requested for data with a kernel component."""


def default_spectral_rates(max_degree: int) -> np.ndarray:
    """Per-degree rates for the spectral-diagonal backend: rate(n) = n, n >= 1.

    Degree 0 is always in the kernel of both operators, so its entry is only
    a placeholder; it is set to 1 to keep the array safely invertible.
    """
    rates = np.arange(max_degree + 1, dtype=np.float64)
    rates[0] = 1.0
    return rates


@dataclass
class CollisionBackend:
    """Relaxation-rate model shared by the two linearized operators."""

    grid: SpectralGrid
    kind: str = "bgk"
    rates: np.ndarray | None = None  # rate per total Hermite degree

    def __post_init__(self) -> None:
        max_degree = 3 * (self.grid.N_v - 1)
        if self.kind == "bgk":
            if self.rates is not None:
                raise ValueError("bgk backend does not take custom rates")
            self.rates = np.ones(max_degree + 1)
        elif self.kind == "spectral-diagonal":
            if self.rates is None:
                self.rates = default_spectral_rates(max_degree)
            else:
                self.rates = np.asarray(self.rates, dtype=np.float64)
                if self.rates.shape != (max_degree + 1,):
                    raise ValueError(
                        f"rates must have one entry per degree 0..{max_degree}"
                    )
                if np.any(self.rates[1:] <= 0):
                    raise ValueError("rates on degrees >= 1 must be positive")
        else:
            raise ValueError(f"unknown collision backend kind {self.kind!r}")

    @cached_property
    def rate_tensor(self) -> np.ndarray:
        """Rate per Hermite multi-index, shape (N_v, N_v, N_v)."""
        return self.rates[self.grid.hermite_degree]

    def rate_at(self, degree: int) -> float:
        return float(self.rates[degree])


# --- kernel projections -----------------------------------------------------

_SQ2 = math.sqrt(2.0)


def kernel_part_L(coeffs: np.ndarray) -> np.ndarray:
    """Hydrodynamic kernel projection on the trailing three Hermite axes.

    Works for any spatial representation carried by the leading axes.
    """
    out = np.zeros_like(coeffs)
    out[..., 0, 0, 0] = coeffs[..., 0, 0, 0]
    out[..., 1, 0, 0] = coeffs[..., 1, 0, 0]
    out[..., 0, 1, 0] = coeffs[..., 0, 1, 0]
    out[..., 0, 0, 1] = coeffs[..., 0, 0, 1]
    # radial part of the degree-2 shell: component along (psi_200+psi_020+psi_002)/sqrt(3)
    radial = (coeffs[..., 2, 0, 0] + coeffs[..., 0, 2, 0] + coeffs[..., 0, 0, 2]) / 3.0
    out[..., 2, 0, 0] = radial
    out[..., 0, 2, 0] = radial
    out[..., 0, 0, 2] = radial
    return out


def kernel_part_sf(coeffs: np.ndarray) -> np.ndarray:
    """Charge kernel projection (the constant mode) on the Hermite axes."""
    out = np.zeros_like(coeffs)
    out[..., 0, 0, 0] = coeffs[..., 0, 0, 0]
    return out


def project_P_L(f: DistributionField) -> DistributionField:
    """Projection onto the hydrodynamic kernel span{1, v, |v|^2}.

    In moment form the projection is rho + u.v + theta (|v|^2 - 3)/2 with
    rho, u, theta the mass, momentum and temperature perturbations of f.
    """
    return DistributionField(kernel_part_L(f.coeffs), f.grid)


def project_P_Lsf(g: DistributionField) -> DistributionField:
    """Projection onto the charge kernel span{1}."""
    return DistributionField(kernel_part_sf(g.coeffs), g.grid)


@dataclass
class Moments:
    """Low-order velocity moments of a distribution, as spatial Fourier data.

    For the hydrodynamic species: density rho, bulk velocity u, temperature
    theta.  For the charge species the same slots hold n, the current j, and
    the (unused) radial degree-2 moment.
    """

    density: np.ndarray  # x_shape, complex Fourier coefficients
    flux: np.ndarray  # (3, *x_shape)
    theta: np.ndarray  # x_shape


def moments(f: DistributionField) -> Moments:
    c = f.coeffs
    density = c[..., 0, 0, 0].copy()
    flux = np.stack([c[..., 1, 0, 0], c[..., 0, 1, 0], c[..., 0, 0, 1]])
    theta = (_SQ2 / 3.0) * (c[..., 2, 0, 0] + c[..., 0, 2, 0] + c[..., 0, 0, 2])
    return Moments(density=density, flux=flux, theta=theta)


def from_moments(
    grid: SpectralGrid, density: np.ndarray, flux: np.ndarray, theta: np.ndarray
) -> DistributionField:
    """Hydrodynamic distribution rho + u.v + theta (|v|^2 - 3)/2 from moments."""
    out = DistributionField.zeros(grid)
    c = out.coeffs
    c[..., 0, 0, 0] = density
    c[..., 1, 0, 0] = flux[0]
    c[..., 0, 1, 0] = flux[1]
    c[..., 0, 0, 1] = flux[2]
    half = theta * (_SQ2 / 2.0)
    c[..., 2, 0, 0] = half
    c[..., 0, 2, 0] = half
    c[..., 0, 0, 2] = half
    return out


# --- operator application and inversion ------------------------------------


def apply_L(f: DistributionField, backend: CollisionBackend) -> DistributionField:
    """Hydrodynamic relaxation operator: degree-rate times non-kernel part."""
    perp = f.coeffs - project_P_L(f).coeffs
    return DistributionField(backend.rate_tensor * perp, f.grid)


def apply_Lsf(g: DistributionField, backend: CollisionBackend) -> DistributionField:
    """Charge relaxation operator: degree-rate times non-kernel part."""
    perp = g.coeffs - project_P_Lsf(g).coeffs
    return DistributionField(backend.rate_tensor * perp, g.grid)


def solve_inverse_L(
    rhs: DistributionField,
    backend: CollisionBackend,
    which: str = "L",
    kernel_tol: float = 1e-10,
) -> DistributionField:
    """Solve the relaxation operator on the orthogonal complement of its kernel.

    The right-hand side must be orthogonal to the kernel; a relative kernel
    component larger than kernel_tol raises KernelComponentError.  The
    solution is the mean-free one (no kernel part).
    """
    if which == "L":
        kernel_part = project_P_L(rhs)
    elif which == "Lsf":
        kernel_part = project_P_Lsf(rhs)
    else:
        raise ValueError(f"which must be 'L' or 'Lsf', got {which!r}")
    total = math.sqrt(max(inner_product(rhs, rhs), 0.0))
    bad = math.sqrt(max(inner_product(kernel_part, kernel_part), 0.0))
    if total > 0 and bad > kernel_tol * total:
        raise KernelComponentError(
            f"right-hand side has relative kernel component {bad / total:.3e}"
        )
    perp = rhs.coeffs - kernel_part.coeffs
    return DistributionField(perp / backend.rate_tensor, rhs.grid)


# --- named velocity polynomials --------------------------------------------


def velocity_tensor_v(grid: SpectralGrid, i: int) -> np.ndarray:
    """Hermite coefficients of v_i, shape (N_v,)*3."""
    out = np.zeros(grid.v_shape)
    idx = [0, 0, 0]
    idx[i] = 1
    out[tuple(idx)] = 1.0
    return out


def velocity_tensor_vsq(grid: SpectralGrid) -> np.ndarray:
    """Hermite coefficients of |v|^2 = 3 + sqrt(2)(psi_2 x 1 x 1 + ...)."""
    out = np.zeros(grid.v_shape)
    out[0, 0, 0] = 3.0
    out[2, 0, 0] = _SQ2
    out[0, 2, 0] = _SQ2
    out[0, 0, 2] = _SQ2
    return out


def velocity_tensor_A(grid: SpectralGrid, i: int, j: int) -> np.ndarray:
    """Coefficients of the traceless stress polynomial v_i v_j - delta_ij |v|^2 / 3."""
    base = np.zeros(grid.v_shape)
    base[0, 0, 0] = 1.0
    vij = hermite.mult_t(hermite.mult_t(base, axis=-3 + j), axis=-3 + i)
    if i == j:
        vij = vij - velocity_tensor_vsq(grid) / 3.0
    return vij


def velocity_tensor_B(grid: SpectralGrid, i: int) -> np.ndarray:
    """Coefficients of the heat-flux polynomial v_i (|v|^2 - 5) / 2."""
    vsq5 = velocity_tensor_vsq(grid)
    vsq5[0, 0, 0] -= 5.0
    return 0.5 * hermite.mult_t(vsq5, axis=-3 + i)


def _as_field(grid: SpectralGrid, v_tensor: np.ndarray) -> DistributionField:
    """Spatially constant distribution with the given velocity coefficients."""
    out = DistributionField.zeros(grid)
    out.coeffs[(0,) * grid.d_x] = v_tensor
    return out


def transport_coefficients(backend: CollisionBackend) -> dict[str, float]:
    """Viscosity, heat conductivity and conductivity of the relaxation model.

    Computed from the defining inner products
      nu    = (1/15) sum_ij < Linv A_ij, A_ij >,
      kappa = (2/15) sum_i  < Linv B_i,  B_i  >,
      sigma = (1/3)  sum_i  < Linv_charge v_i, v_i >,
    where A_ij = v_i v_j - delta_ij |v|^2/3 and B_i = v_i (|v|^2 - 5)/2.
    The bgk backend gives (2/3, 1, 1) exactly.
    """
    grid = backend.grid
    nu = 0.0
    for i in range(3):
        for j in range(3):
            a = _as_field(grid, velocity_tensor_A(grid, i, j))
            nu += inner_product(solve_inverse_L(a, backend, "L"), a)
    nu /= 15.0 * grid.volume
    kappa = 0.0
    for i in range(3):
        b = _as_field(grid, velocity_tensor_B(grid, i))
        kappa += inner_product(solve_inverse_L(b, backend, "L"), b)
    kappa *= 2.0 / (15.0 * grid.volume)
    sigma = 0.0
    for i in range(3):
        v = _as_field(grid, velocity_tensor_v(grid, i))
        sigma += inner_product(solve_inverse_L(v, backend, "Lsf"), v)
    sigma /= 3.0 * grid.volume
    return {"nu": nu, "kappa": kappa, "sigma": sigma}


# --- bilinear remainder -----------------------------------------------------


def _phase_product(f: DistributionField, h: DistributionField) -> np.ndarray:
    """Pointwise product of two phase-space functions, back in coefficients.

    Spatial factor by collocation on the native grid with the 2/3 mask, which
    is alias-free for band-limited inputs; velocity factor by Gauss-Hermite
    collocation with enough nodes for exact re-analysis of the product.
    """
    grid = f.grid
    synthesis, analysis = grid.quad_matrices
    nx = float(np.prod(grid.x_shape))
    x_axes = tuple(range(grid.d_x))

    def to_grid(c: np.ndarray) -> np.ndarray:
        vals_x = np.fft.ifftn(c, axes=x_axes) * nx
        return hermite.to_values(np.real(vals_x), synthesis)

    prod = to_grid(f.coeffs) * to_grid(h.coeffs)
    coeffs_v = hermite.to_coeffs(prod, analysis)
    out = np.fft.fftn(coeffs_v, axes=x_axes) / nx
    return apply_dealias(out, grid)


def gamma_L(f: DistributionField, h: DistributionField) -> DistributionField:
    """Bilinear remainder for the hydrodynamic operator: half the non-kernel part of f h.

    The factor 1/2 is the symmetrized quadratic closure: with it, the
    deviatoric second moment of gamma_L(Pf, Pf) is u (x) u - |u|^2/3 I and the
    heat-flux moment is (5/2) u theta, which are exactly the advective fluxes
    of the limiting momentum and temperature equations.
    """
    prod = DistributionField(_phase_product(f, h), f.grid)
    return DistributionField(0.5 * (prod.coeffs - project_P_L(prod).coeffs), f.grid)


def gamma_Lsf(f: DistributionField, h: DistributionField) -> DistributionField:
    """Bilinear remainder for the charge operator: non-kernel part of f h.

    No extra factor here: the first moment of gamma_Lsf(n 1, Pf) is then
    exactly n u, the convective current of the limiting Ohm law.
    """
    prod = DistributionField(_phase_product(f, h), f.grid)
    return DistributionField(prod.coeffs - project_P_Lsf(prod).coeffs, f.grid)
