"""Discrete phase space: Fourier modes on a torus times a tensor Hermite basis.

Functions live on T^d x R^3 with d in {1, 2, 3}.  Spatial dependence is stored
as full complex Fourier coefficients C(k) with f(x) = sum_k C(k) exp(i k.x)
(numpy fft layout, wavenumbers 2*pi/L * integer).  Velocity dependence is
stored as coefficients of the orthonormal Hermite functions under the global
Maxwellian weight M(v) = (2*pi)^(-3/2) exp(-|v|^2/2); the array holds the
relative perturbation itself, never M times it, so all M-weighted inner
products are plain coefficient sums.

Array layout: distribution coefficients have shape (*x_shape, N_v, N_v, N_v);
3-component field coefficients have shape (3, *x_shape).

States are kept band-limited to the 2/3-rule mask at all times, which makes
quadratic products alias-free on the native collocation grid and keeps the
discrete moment identities exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as _iproduct

import numpy as np

from . import hermite


class GridMismatchError(ValueError):
    """Raised when operands built on different grids are combined."""


@dataclass
class SpectralGrid:
    """Resolution and geometry of the discrete phase space.

    d_x: spatial dimension (1 to 3), N_x: Fourier points per spatial
    direction, N_v: Hermite modes per velocity direction (per-direction
    truncation n_i < N_v), L_x: torus period.
    """

    d_x: int = 1
    N_x: int = 32
    N_v: int = 12
    L_x: float = 2.0 * math.pi
    quad_factor: int = 2  # velocity quadrature nodes per mode for products

    def __post_init__(self) -> None:
        if self.d_x not in (1, 2, 3):
            raise ValueError(f"d_x must be 1, 2 or 3, got {self.d_x}")
        if self.N_x < 4 or self.N_x % 2:
            raise ValueError(f"N_x must be even and >= 4, got {self.N_x}")
        if self.N_v < 4:
            raise ValueError(f"N_v must be >= 4, got {self.N_v}")
        if self.L_x <= 0:
            raise ValueError("L_x must be positive")

    # --- geometry -----------------------------------------------------------

    @property
    def x_shape(self) -> tuple[int, ...]:
        return (self.N_x,) * self.d_x

    @property
    def x_axes(self) -> tuple[int, ...]:
        return tuple(range(self.d_x))

    @property
    def volume(self) -> float:
        return self.L_x**self.d_x

    @cached_property
    def k_int(self) -> np.ndarray:
        """Integer wavenumbers in fft layout, shape (N_x,)."""
        return np.fft.fftfreq(self.N_x, 1.0 / self.N_x).astype(np.int64)

    @cached_property
    def k3(self) -> list[np.ndarray]:
        """Wavevector components embedded in R^3, broadcastable over x_shape."""
        base = 2.0 * math.pi / self.L_x * self.k_int.astype(np.float64)
        comps = []
        for i in range(3):
            if i < self.d_x:
                shape = [1] * self.d_x
                shape[i] = self.N_x
                comps.append(base.reshape(shape))
            else:
                comps.append(np.zeros((1,) * self.d_x))
        return comps

    @cached_property
    def k_sq(self) -> np.ndarray:
        out = np.zeros(self.x_shape)
        for c in self.k3:
            out = out + c**2
        return out

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keep |k_i| <= N_x // 3 in every spatial direction."""
        keep = np.abs(self.k_int) <= self.N_x // 3
        mask = np.ones(self.x_shape, dtype=bool)
        for ax in range(self.d_x):
            shape = [1] * self.d_x
            shape[ax] = self.N_x
            mask &= keep.reshape(shape)
        return mask

    # --- velocity basis -----------------------------------------------------

    @cached_property
    def v_shape(self) -> tuple[int, int, int]:
        return (self.N_v,) * 3

    @cached_property
    def hermite_degree(self) -> np.ndarray:
        """Total degree n1+n2+n3 per Hermite multi-index, shape (N_v,)*3."""
        n = np.arange(self.N_v)
        return n[:, None, None] + n[None, :, None] + n[None, None, :]

    @cached_property
    def v_max(self) -> float:
        """Largest Gauss node of the truncation, the transport speed bound."""
        nodes, _ = hermite.gauss_hermite(self.N_v)
        return float(np.max(np.abs(nodes)))

    @cached_property
    def quad_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """(synthesis, analysis) pair for the product quadrature grid."""
        return hermite.transform_matrices(self.N_v, self.quad_factor * self.N_v)

    @cached_property
    def lambda_gram(self) -> np.ndarray:
        """Gram matrix of the weight 1 + |v| in the tensor Hermite basis.

        Returns the flat (N_v^3, N_v^3) symmetric matrix W with
        W[a, b] = integral Psi_a Psi_b (1 + |v|) M dv, built by tensor
        Gauss-Hermite quadrature (validated against closed-form radial
        moments in the test suite).
        """
        n_q = max(48, 4 * self.N_v)
        nodes, weights = hermite.gauss_hermite(n_q)
        v_basis = hermite.eval_functions(self.N_v, nodes)  # (Q, N)
        r = np.sqrt(
            nodes[:, None, None] ** 2 + nodes[None, :, None] ** 2 + nodes[None, None, :] ** 2
        )
        wr = (
            r
            * weights[:, None, None]
            * weights[None, :, None]
            * weights[None, None, :]
        )
        # contract one velocity direction at a time
        pair = np.einsum("qa,qb->qab", v_basis, v_basis)  # (Q, N, N)
        t1 = np.tensordot(pair, wr, axes=([0], [0]))  # (a1, b1, q2, q3)
        t2 = np.tensordot(t1, pair, axes=([2], [0]))  # (a1, b1, q3, a2, b2)
        t3 = np.tensordot(t2, pair, axes=([2], [0]))  # (a1, b1, a2, b2, a3, b3)
        n3 = self.N_v**3
        w_r = t3.transpose(0, 2, 4, 1, 3, 5).reshape(n3, n3)
        w_r = 0.5 * (w_r + w_r.T)
        return np.eye(n3) + w_r


@dataclass
class DistributionField:
    """Coefficient tensor of a scalar phase-space function on a grid."""

    coeffs: np.ndarray
    grid: SpectralGrid = field(repr=False)

    def __post_init__(self) -> None:
        expected = self.grid.x_shape + self.grid.v_shape
        if self.coeffs.shape != expected:
            raise GridMismatchError(
                f"coefficient shape {self.coeffs.shape} does not match grid {expected}"
            )

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "DistributionField":
        return cls(np.zeros(grid.x_shape + grid.v_shape, dtype=np.complex128), grid)

    def copy(self) -> "DistributionField":
        return DistributionField(self.coeffs.copy(), self.grid)


@dataclass
class VectorField3:
    """Three real spatial fields stored as Fourier coefficients, shape (3, *x)."""

    coeffs: np.ndarray
    grid: SpectralGrid = field(repr=False)

    def __post_init__(self) -> None:
        expected = (3,) + self.grid.x_shape
        if self.coeffs.shape != expected:
            raise GridMismatchError(
                f"coefficient shape {self.coeffs.shape} does not match grid {expected}"
            )

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "VectorField3":
        return cls(np.zeros((3,) + grid.x_shape, dtype=np.complex128), grid)

    def copy(self) -> "VectorField3":
        return VectorField3(self.coeffs.copy(), self.grid)


def _check_same_grid(a, b) -> None:
    if a.grid is not b.grid and a.grid != b.grid:
        raise GridMismatchError("operands live on different grids")


# --- spatial transforms -----------------------------------------------------


def x_to_values(coeffs: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Collocation values on the N_x^d grid from Fourier coefficients (real)."""
    # x axes directly follow any leading component axes and precede velocity axes
    lead = coeffs.ndim - grid.d_x - (3 if coeffs.shape[-3:] == grid.v_shape and coeffs.ndim >= 3 + grid.d_x else 0)
    axes = tuple(range(lead, lead + grid.d_x))
    scale = float(np.prod(grid.x_shape))
    return np.real(np.fft.ifftn(coeffs, axes=axes) * scale)


def x_to_coeffs(values: np.ndarray, grid: SpectralGrid, dealias: bool = True) -> np.ndarray:
    """Fourier coefficients from collocation values, optionally 2/3 masked."""
    lead = values.ndim - grid.d_x - (3 if values.shape[-3:] == grid.v_shape and values.ndim >= 3 + grid.d_x else 0)
    axes = tuple(range(lead, lead + grid.d_x))
    scale = float(np.prod(grid.x_shape))
    out = np.fft.fftn(values, axes=axes) / scale
    if dealias:
        mask = grid.dealias_mask.reshape(
            (1,) * lead + grid.x_shape + (1,) * (values.ndim - lead - grid.d_x)
        )
        out = out * mask
    return out


def apply_dealias(coeffs: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Zero every Fourier mode outside the 2/3 mask (any leading/trailing axes)."""
    lead = coeffs.ndim - grid.d_x - (3 if coeffs.shape[-3:] == grid.v_shape and coeffs.ndim >= 3 + grid.d_x else 0)
    mask = grid.dealias_mask.reshape(
        (1,) * lead + grid.x_shape + (1,) * (coeffs.ndim - lead - grid.d_x)
    )
    return coeffs * mask


# --- inner products and norms ----------------------------------------------


def inner_product(f: DistributionField, h: DistributionField) -> float:
    """M-weighted L^2 pairing integral integral f h M dv dx."""
    _check_same_grid(f, h)
    return float(np.real(np.vdot(h.coeffs, f.coeffs)) * f.grid.volume)


def norm_l2(f: DistributionField) -> float:
    return math.sqrt(max(inner_product(f, f), 0.0))


def vector_inner(a: VectorField3, b: VectorField3) -> float:
    """integral a . b dx for real vector fields."""
    _check_same_grid(a, b)
    return float(np.real(np.vdot(b.coeffs, a.coeffs)) * a.grid.volume)


def _x_weight(grid: SpectralGrid, s: int) -> np.ndarray:
    """sum_{m<=s} |k|^(2m) per spatial mode."""
    out = np.zeros(grid.x_shape)
    for m in range(s + 1):
        out += grid.k_sq**m
    return out


def _v_derivative_table(coeffs: np.ndarray, grid: SpectralGrid, s: int) -> dict[tuple[int, int, int], np.ndarray]:
    """All velocity derivatives d_v^m coeffs for |m| <= s, keyed by multi-index."""
    table: dict[tuple[int, int, int], np.ndarray] = {(0, 0, 0): coeffs}
    for order in range(1, s + 1):
        for m in _iproduct(range(order + 1), repeat=3):
            if sum(m) != order:
                continue
            # differentiate the first direction with a nonzero entry
            for i in range(3):
                if m[i] > 0:
                    prev = list(m)
                    prev[i] -= 1
                    table[m] = hermite.ddt(table[tuple(prev)], axis=-3 + i)
                    break
    return table


def _multinomial(m: tuple[int, int, int]) -> float:
    j = sum(m)
    return math.factorial(j) / (math.factorial(m[0]) * math.factorial(m[1]) * math.factorial(m[2]))


def _mode_profile(coeffs: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """sum over Hermite indices of |coeffs|^2, one value per spatial mode."""
    flat = coeffs.reshape(grid.x_shape + (-1,))
    return np.einsum("...n,...n->...", flat, np.conj(flat)).real


def _lambda_profile(coeffs: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Per-spatial-mode quadratic form with the 1+|v| Gram matrix."""
    flat = coeffs.reshape((-1, grid.N_v**3))
    y = flat @ grid.lambda_gram
    return np.einsum("kn,kn->k", np.conj(flat), y).real.reshape(grid.x_shape)


def sobolev_norm(f: DistributionField, s: int, mode: str = "x") -> float:
    """Sobolev norm of order s.

    mode selects the family:
      "x"        sum_{i<=s} ||grad_x^i f||^2 (unit velocity weight)
      "mixed"    sum_{i+j<=s} ||grad_x^i grad_v^j f||^2
      "lambda-x" as "x" with the 1+|v| velocity weight
      "lambda"   as "mixed" with the 1+|v| velocity weight
    Returns the square root of the sum.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    grid = f.grid
    weighted = mode in ("lambda", "lambda-x")
    mixed = mode in ("mixed", "lambda")
    if mode not in ("x", "mixed", "lambda", "lambda-x"):
        raise ValueError(f"unknown mode {mode!r}")
    profile = _lambda_profile if weighted else _mode_profile
    if not mixed:
        p = profile(f.coeffs, grid)
        total = float(np.sum(_x_weight(grid, s) * p)) * grid.volume
        return math.sqrt(max(total, 0.0))
    table = _v_derivative_table(f.coeffs, grid, s)
    total = 0.0
    for j in range(s + 1):
        acc = np.zeros(grid.x_shape)
        for m, arr in table.items():
            if sum(m) == j:
                acc = acc + _multinomial(m) * profile(arr, grid)
        total += float(np.sum(_x_weight(grid, s - j) * acc)) * grid.volume
    return math.sqrt(max(total, 0.0))


def sobolev_norm_vector(F: VectorField3, s: int) -> float:
    """H^s_x norm of a 3-component spatial field."""
    grid = F.grid
    p = np.einsum("c...,c...->...", F.coeffs, np.conj(F.coeffs)).real
    total = float(np.sum(_x_weight(grid, s) * p)) * grid.volume
    return math.sqrt(max(total, 0.0))


# --- derivatives ------------------------------------------------------------


def grad_x(f: DistributionField, direction: int) -> DistributionField:
    """Exact spectral x-derivative along a spatial direction (0-based)."""
    grid = f.grid
    if not 0 <= direction < grid.d_x:
        raise ValueError(f"direction {direction} outside spatial dimension {grid.d_x}")
    k = grid.k3[direction].reshape(grid.k3[direction].shape + (1, 1, 1))
    return DistributionField(1j * k * f.coeffs, grid)


def grad_v(f: DistributionField, direction: int) -> DistributionField:
    """Velocity derivative along one of the three velocity directions."""
    if not 0 <= direction < 3:
        raise ValueError("velocity direction must be 0, 1 or 2")
    return DistributionField(hermite.ddt(f.coeffs, axis=-3 + direction), f.grid)


def mult_v(f: DistributionField, direction: int) -> DistributionField:
    """Multiplication by the velocity coordinate v_i in coefficient space."""
    if not 0 <= direction < 3:
        raise ValueError("velocity direction must be 0, 1 or 2")
    return DistributionField(hermite.mult_t(f.coeffs, axis=-3 + direction), f.grid)


def divergence(F: VectorField3) -> np.ndarray:
    """div F as a scalar Fourier coefficient array."""
    grid = F.grid
    out = np.zeros(grid.x_shape, dtype=np.complex128)
    for i in range(3):
        out = out + 1j * grid.k3[i] * F.coeffs[i]
    return out


def curl(F: VectorField3) -> VectorField3:
    """curl F = i k x F in Fourier space."""
    grid = F.grid
    k = grid.k3
    c = F.coeffs
    out = np.empty_like(c)
    out[0] = 1j * (k[1] * c[2] - k[2] * c[1])
    out[1] = 1j * (k[2] * c[0] - k[0] * c[2])
    out[2] = 1j * (k[0] * c[1] - k[1] * c[0])
    return VectorField3(out, grid)


def helmholtz_decompose(F: VectorField3) -> tuple[VectorField3, VectorField3, np.ndarray]:
    """Split F into (gradient part, divergence-free part, spatial mean).

    The gradient part is the projection of each nonzero Fourier mode onto its
    wavevector; the divergence-free part is the complement; the mean is the
    k = 0 coefficient.  F = mean + gradient + divergence-free exactly.
    """
    grid = F.grid
    ksq = grid.k_sq
    safe = np.where(ksq > 0, ksq, 1.0)
    k_dot_f = np.zeros(grid.x_shape, dtype=np.complex128)
    for i in range(3):
        k_dot_f = k_dot_f + grid.k3[i] * F.coeffs[i]
    grad = np.empty_like(F.coeffs)
    for i in range(3):
        grad[i] = grid.k3[i] * k_dot_f / safe
    zero = (0,) * grid.d_x
    mean = F.coeffs[(slice(None),) + zero].copy()
    grad[(slice(None),) + zero] = 0.0
    df = F.coeffs - grad
    df[(slice(None),) + zero] = 0.0
    return VectorField3(grad, grid), VectorField3(df, grid), mean


def leray_project(F: VectorField3) -> VectorField3:
    """Remove the gradient part of every nonzero mode (keeps the mean)."""
    grad, df, mean = helmholtz_decompose(F)
    out = df.coeffs.copy()
    zero = (0,) * F.grid.d_x
    out[(slice(None),) + zero] = mean
    return VectorField3(out, F.grid)


def hermitian_symmetrize(coeffs: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Project Fourier coefficients onto the reality symmetry C(-k) = conj C(k)."""
    lead = coeffs.ndim - grid.d_x - (3 if coeffs.shape[-3:] == grid.v_shape and coeffs.ndim >= 3 + grid.d_x else 0)
    axes = tuple(range(lead, lead + grid.d_x))
    mirrored = coeffs
    for ax in axes:
        mirrored = np.roll(np.flip(mirrored, axis=ax), 1, axis=ax)
    return 0.5 * (coeffs + np.conj(mirrored))
