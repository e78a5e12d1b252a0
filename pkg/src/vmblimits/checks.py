"""Runtime verification of the collision operator assumptions.

Each check exercises one structural assumption the solver relies on and
reports a named pass/fail result with the observed violation measure.  The
suite can also run against a deliberately flawed operator (``flaw=``) to
demonstrate that a broken assumption is detected and named; this is what the
command-line fixture switch uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .collisions import (
    CollisionBackend,
    apply_L,
    apply_Lsf,
    from_moments,
    gamma_L,
    gamma_Lsf,
    kernel_part_L,
    kernel_part_sf,
    project_P_L,
    project_P_Lsf,
    solve_inverse_L,
    transport_coefficients,
    velocity_tensor_A,
    velocity_tensor_B,
)
from .grid import DistributionField, hermitian_symmetrize, inner_product, norm_l2

FLAW_NAMES = ("broken-kernel", "broken-adjoint")

PROPERTY_NAMES = (
    "kernel-annihilation",
    "moment-conservation",
    "self-adjointness",
    "coercivity",
    "bilinear-orthogonality",
    "inverse-reconstruction",
    "transport-positivity",
)

_DETAILS = {
    "kernel-annihilation": (
        "the relaxation operators vanish on their conserved-moment kernels"
    ),
    "moment-conservation": (
        "the operator range is orthogonal to the kernel, so collisions "
        "change no conserved moment"
    ),
    "self-adjointness": (
        "the operators are symmetric for the Gaussian-weighted pairing"
    ),
    "coercivity": (
        "the quadratic form controls the non-kernel part with the "
        "degree-one spectral gap"
    ),
    "bilinear-orthogonality": (
        "the quadratic interaction terms land in the non-kernel range"
    ),
    "inverse-reconstruction": (
        "applying the operator after its restricted inverse returns the "
        "stress and heat-flux polynomials"
    ),
    "transport-positivity": (
        "the viscosity, conductivity and charge mobility derived from the "
        "rates are positive and finite"
    ),
}


@dataclass(frozen=True)
class PropertyResult:
    """Outcome of one operator check."""

    name: str
    passed: bool
    measure: float
    tolerance: float
    detail: str


def _random_field(grid, rng, kernel_only: bool = False) -> DistributionField:
    c = rng.standard_normal(grid.x_shape + grid.v_shape) + 1j * rng.standard_normal(grid.x_shape + grid.v_shape)
    if kernel_only:
        c = kernel_part_L(c)
    return DistributionField(hermitian_symmetrize(0.1 * c, grid), grid)


class _FlawedOperators:
    """Operator pair with an optional deliberate defect mixed in."""

    def __init__(self, backend: CollisionBackend, flaw: str | None):
        if flaw is not None and flaw not in FLAW_NAMES:
            raise ValueError(f"unknown flaw {flaw!r}, expected one of {FLAW_NAMES}")
        self.backend = backend
        self.flaw = flaw

    def apply_l(self, f: DistributionField) -> DistributionField:
        out = apply_L(f, self.backend)
        if self.flaw == "broken-kernel":
            # leak a fraction of the conserved moments back into the output
            return DistributionField(
                out.coeffs + 1e-3 * kernel_part_L(f.coeffs), f.grid
            )
        if self.flaw == "broken-adjoint":
            # one-directional coupling between two non-kernel Hermite slots
            c = out.coeffs.copy()
            c[..., 3, 0, 0] += 1e-3 * f.coeffs[..., 0, 3, 0]
            return DistributionField(c, f.grid)
        return out

    def apply_lsf(self, g: DistributionField) -> DistributionField:
        out = apply_Lsf(g, self.backend)
        if self.flaw == "broken-kernel":
            return DistributionField(
                out.coeffs + 1e-3 * kernel_part_sf(g.coeffs), g.grid
            )
        return out


def collision_property_suite(
    backend: CollisionBackend, seed: int = 0, flaw: str | None = None
) -> list[PropertyResult]:
    """Run all operator checks against a backend; deterministic for a seed."""
    grid = backend.grid
    rng = np.random.default_rng(seed)
    ops = _FlawedOperators(backend, flaw)
    results: list[PropertyResult] = []

    def record(name: str, measure: float, tolerance: float, passed: bool) -> None:
        results.append(
            PropertyResult(
                name=name,
                passed=bool(passed),
                measure=float(measure),
                tolerance=float(tolerance),
                detail=_DETAILS[name],
            )
        )

    # kernel annihilation: L on span{1, v, |v|^2} and the charge operator on
    # constants must both give zero
    kernel_f = _random_field(grid, rng, kernel_only=True)
    kernel_g = DistributionField(
        kernel_part_sf(_random_field(grid, rng).coeffs), grid
    )
    measure = max(
        norm_l2(ops.apply_l(kernel_f)) / max(norm_l2(kernel_f), 1e-300),
        norm_l2(ops.apply_lsf(kernel_g)) / max(norm_l2(kernel_g), 1e-300),
    )
    record("kernel-annihilation", measure, 1e-12, measure <= 1e-12)

    # moment conservation: the kernel projection of any output vanishes
    probe = _random_field(grid, rng)
    out_l = ops.apply_l(probe)
    out_sf = ops.apply_lsf(probe)
    measure = max(
        norm_l2(project_P_L(out_l)) / max(norm_l2(out_l), 1e-300),
        norm_l2(project_P_Lsf(out_sf)) / max(norm_l2(out_sf), 1e-300),
    )
    record("moment-conservation", measure, 1e-12, measure <= 1e-12)

    # self-adjointness for the Gaussian-weighted pairing
    f1 = _random_field(grid, rng)
    f2 = _random_field(grid, rng)
    measure = 0.0
    for op in (ops.apply_l, ops.apply_lsf):
        lhs = inner_product(op(f1), f2)
        rhs = inner_product(f1, op(f2))
        scale = max(abs(lhs), abs(rhs), 1e-300)
        measure = max(measure, abs(lhs - rhs) / scale)
    record("self-adjointness", measure, 1e-12, measure <= 1e-12)

    # coercivity: <Lf, f> >= gap * |f - Pf|^2 with the degree-one gap
    gap = float(np.min(backend.rates[1:]))
    worst = np.inf
    for _ in range(4):
        f = _random_field(grid, rng)
        perp = DistributionField(f.coeffs - kernel_part_L(f.coeffs), grid)
        denom = gap * inner_product(perp, perp)
        if denom <= 0:
            continue
        worst = min(worst, inner_product(ops.apply_l(f), f) / denom)
    record("coercivity", worst, 1.0 - 1e-12, worst >= 1.0 - 1e-12)

    # bilinear orthogonality: the quadratic interactions are non-kernel
    h1 = _random_field(grid, rng)
    h2 = _random_field(grid, rng)
    gam_l = gamma_L(h1, h2)
    gam_sf = gamma_Lsf(h1, h2)
    measure = max(
        norm_l2(project_P_L(gam_l)) / max(norm_l2(gam_l), 1e-300),
        norm_l2(project_P_Lsf(gam_sf)) / max(norm_l2(gam_sf), 1e-300),
    )
    record("bilinear-orthogonality", measure, 1e-12, measure <= 1e-12)

    # inverse reconstruction on the stress and heat-flux polynomials
    measure = 0.0
    fields = [velocity_tensor_A(grid, 0, 1), velocity_tensor_B(grid, 0)]
    for tensor in fields:
        c = np.zeros(grid.x_shape + grid.v_shape, dtype=np.complex128)
        c[(0,) * grid.d_x] = tensor
        poly = DistributionField(c, grid)
        inv = solve_inverse_L(poly, backend)
        back = ops.apply_l(inv)
        measure = max(
            measure,
            norm_l2(DistributionField(back.coeffs - poly.coeffs, grid))
            / max(norm_l2(poly), 1e-300),
        )
    record("inverse-reconstruction", measure, 1e-12, measure <= 1e-12)

    # transport coefficients derived from the rates
    coeffs = transport_coefficients(backend)
    values = [coeffs["nu"], coeffs["kappa"], coeffs["sigma"]]
    measure = float(min(values))
    finite = all(np.isfinite(v) for v in values)
    record("transport-positivity", measure, 0.0, finite and measure > 0.0)

    return results


def failed_properties(results: list[PropertyResult]) -> list[PropertyResult]:
    return [r for r in results if not r.passed]
