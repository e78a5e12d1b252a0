"""One-dimensional Hermite basis machinery for the velocity discretization.

The basis functions are normalized probabilists' Hermite polynomials
psi_n(t) = He_n(t)/sqrt(n!), orthonormal under the unit Gaussian weight
m(t) = (2*pi)^(-1/2) exp(-t^2/2).  Three-dimensional velocity space uses the
tensor product over the last three array axes; every routine here acts on a
single axis so callers can compose directions freely.

Ladder identities used throughout:

    t * psi_n   = sqrt(n+1) psi_{n+1} + sqrt(n) psi_{n-1}
    d/dt psi_n  = sqrt(n) psi_{n-1}

Multiplication by t therefore shifts Hermite indices by +-1 and the plain
derivative is a pure down-shift on coefficients.  The up-shift out of the top
retained mode is dropped (standard lossy Hermite closure).
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import hermite_e

_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


def ladder(n_modes: int) -> np.ndarray:
    """sqrt(1..n_modes-1), the off-diagonal of the multiplication matrix."""
    return np.sqrt(np.arange(1, n_modes, dtype=np.float64))


def gauss_hermite(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss nodes and weights for the unit Gaussian weight m(t).

    Weights are normalized so that sum(w) = 1 = integral of m; the rule is
    exact for polynomials of degree <= 2*n_nodes - 1.
    """
    nodes, weights = hermite_e.hermegauss(n_nodes)
    return nodes, weights / _SQRT_2PI


def eval_functions(n_modes: int, points: np.ndarray) -> np.ndarray:
    """Matrix V[q, n] = psi_n(points[q]) via the stable normalized recurrence."""
    points = np.asarray(points, dtype=np.float64)
    out = np.empty((points.size, n_modes), dtype=np.float64)
    out[:, 0] = 1.0
    if n_modes > 1:
        out[:, 1] = points
    for n in range(2, n_modes):
        out[:, n] = (points * out[:, n - 1] - np.sqrt(n - 1.0) * out[:, n - 2]) / np.sqrt(float(n))
    return out


def mult_t(coeffs: np.ndarray, axis: int) -> np.ndarray:
    """Coefficients of t * f along one Hermite axis (top up-shift truncated)."""
    c = np.moveaxis(coeffs, axis, -1)
    n = c.shape[-1]
    s = ladder(n)
    out = np.empty_like(c)
    out[..., 0] = s[0] * c[..., 1]
    if n > 2:
        out[..., 1:-1] = s[:-1] * c[..., :-2] + s[1:] * c[..., 2:]
    out[..., -1] = s[-1] * c[..., -2]
    return np.moveaxis(out, -1, axis)


def ddt(coeffs: np.ndarray, axis: int) -> np.ndarray:
    """Coefficients of df/dt along one Hermite axis (pure down-shift)."""
    c = np.moveaxis(coeffs, axis, -1)
    s = ladder(c.shape[-1])
    out = np.empty_like(c)
    out[..., :-1] = s * c[..., 1:]
    out[..., -1] = 0.0
    return np.moveaxis(out, -1, axis)


def transform_matrices(n_modes: int, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """(synthesis, analysis) matrices between coefficients and Gauss values.

    values = coeffs @ synthesis.T applied per axis; analysis is the
    quadrature-weighted transpose, an exact left inverse whenever
    n_nodes >= n_modes.
    """
    nodes, weights = gauss_hermite(n_nodes)
    synthesis = eval_functions(n_modes, nodes)  # (Q, N)
    analysis = synthesis.T * weights  # (N, Q)
    return synthesis, analysis


def _tensor_apply(arr: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Apply a matrix along each of the last three axes, preserving order.

    Contracts the last axis by a flat matmul, then cycles it into the third
    position from the end; after three rounds every velocity axis has been
    transformed and the axis order is back to the original.
    """
    mt = matrix.T
    out = arr
    for _ in range(3):
        shape = out.shape
        flat = np.ascontiguousarray(out).reshape(-1, shape[-1])
        out = (flat @ mt).reshape(shape[:-1] + (matrix.shape[0],))
        out = np.moveaxis(out, -1, -3)
    return out


def to_values(coeffs: np.ndarray, synthesis: np.ndarray) -> np.ndarray:
    """Evaluate a tensor-Hermite coefficient array on the tensor Gauss grid."""
    return _tensor_apply(coeffs, synthesis)


def to_coeffs(values: np.ndarray, analysis: np.ndarray) -> np.ndarray:
    """Project tensor Gauss-grid values back onto Hermite coefficients."""
    return _tensor_apply(values, analysis)
