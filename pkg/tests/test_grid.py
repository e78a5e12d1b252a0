import math

import numpy as np
import pytest

from vmblimits.grid import (
    DistributionField,
    GridMismatchError,
    SpectralGrid,
    VectorField3,
    apply_dealias,
    curl,
    divergence,
    grad_v,
    grad_x,
    helmholtz_decompose,
    hermitian_symmetrize,
    inner_product,
    leray_project,
    mult_v,
    norm_l2,
    sobolev_norm,
    sobolev_norm_vector,
    vector_inner,
    x_to_coeffs,
    x_to_values,
)

from fields import random_distribution, random_vector


def cosine_mode(grid: SpectralGrid, hermite_index=(0, 0, 0)) -> DistributionField:
    """cos(x) carried by one Hermite basis function."""
    f = DistributionField.zeros(grid)
    f.coeffs[(1,) + (0,) * (grid.d_x - 1) + hermite_index] = 0.5
    f.coeffs[(-1,) + (0,) * (grid.d_x - 1) + hermite_index] = 0.5
    return f


class TestGridValidation:
    def test_rejects_odd_or_small_n_x(self):
        with pytest.raises(ValueError):
            SpectralGrid(N_x=7)
        with pytest.raises(ValueError):
            SpectralGrid(N_x=2)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            SpectralGrid(d_x=4)

    def test_rejects_small_n_v(self):
        with pytest.raises(ValueError):
            SpectralGrid(N_v=3)

    def test_shape_mismatch_raises(self, small_grid):
        with pytest.raises(GridMismatchError):
            DistributionField(np.zeros((2, 2)), small_grid)
        with pytest.raises(GridMismatchError):
            VectorField3(np.zeros((2,) + small_grid.x_shape), small_grid)


class TestTransforms:
    def test_round_trip(self, small_grid, rng):
        f = random_distribution(small_grid, rng)
        masked = apply_dealias(f.coeffs, small_grid)
        values = x_to_values(masked, small_grid)
        back = x_to_coeffs(values, small_grid)
        np.testing.assert_allclose(back, masked, atol=2e-14)

    def test_values_are_real_for_symmetric_coeffs(self, small_grid, rng):
        f = random_distribution(small_grid, rng)
        values = x_to_values(f.coeffs, small_grid)
        assert values.dtype == np.float64

    def test_parseval(self, small_grid, rng):
        f = random_distribution(small_grid, rng)
        values = x_to_values(f.coeffs, small_grid)
        integral = float(np.sum(values**2)) / small_grid.N_x**small_grid.d_x * small_grid.volume
        coeff_sum = float(np.sum(np.abs(f.coeffs) ** 2)) * small_grid.volume
        assert integral == pytest.approx(coeff_sum, rel=1e-12)

    def test_hermitian_symmetrize_idempotent(self, small_grid, rng):
        raw = rng.standard_normal(small_grid.x_shape + small_grid.v_shape) + 1j * rng.standard_normal(
            small_grid.x_shape + small_grid.v_shape
        )
        sym = hermitian_symmetrize(raw, small_grid)
        np.testing.assert_allclose(hermitian_symmetrize(sym, small_grid), sym, atol=1e-14)
        # C(-k) = conj C(k)
        np.testing.assert_allclose(np.roll(sym[::-1], 1, axis=0), np.conj(sym), atol=1e-14)

    def test_dealias_keeps_band(self, small_grid):
        coeffs = np.ones(small_grid.x_shape, dtype=np.complex128)
        masked = apply_dealias(coeffs, small_grid)
        keep = np.abs(small_grid.k_int) <= small_grid.N_x // 3
        assert np.all(masked[keep] == 1.0)
        assert np.all(masked[~keep] == 0.0)


class TestNormsFrozenValues:
    """Closed-form values on the default torus length 2 pi."""

    def test_l2_of_cosine(self):
        grid = SpectralGrid(d_x=1, N_x=8, N_v=4)
        f = cosine_mode(grid)
        assert inner_product(f, f) == pytest.approx(math.pi, rel=1e-13)
        assert norm_l2(f) == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    def test_l2_of_cosine_times_v1(self):
        grid = SpectralGrid(d_x=1, N_x=8, N_v=4)
        f = cosine_mode(grid, (1, 0, 0))
        assert inner_product(f, f) == pytest.approx(math.pi, rel=1e-13)

    def test_sobolev_x_orders(self):
        grid = SpectralGrid(d_x=1, N_x=8, N_v=4)
        f = cosine_mode(grid)
        assert sobolev_norm(f, 1, "x") == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-13)
        assert sobolev_norm(f, 2, "x") == pytest.approx(math.sqrt(3.0 * math.pi), rel=1e-13)

    def test_sobolev_mixed_counts_velocity_derivative(self):
        grid = SpectralGrid(d_x=1, N_x=8, N_v=4)
        f = cosine_mode(grid, (1, 0, 0))
        # |k|=1 mode: s=1 mixed norm squared = ||f||^2 + ||d_x f||^2 + ||d_v f||^2
        assert sobolev_norm(f, 1, "mixed") == pytest.approx(math.sqrt(3.0 * math.pi), rel=1e-13)

    def test_lambda_weight_value(self):
        # E[v1^2 |v|] = E[|v|^3]/3 = (1/3) 2^(3/2) Gamma(3)/Gamma(3/2)
        grid = SpectralGrid(d_x=1, N_x=8, N_v=10)
        f = cosine_mode(grid, (1, 0, 0))
        expected = math.pi * (1.0 + (2.0 ** 1.5) * 2.0 / (3.0 * math.gamma(1.5)))
        assert sobolev_norm(f, 0, "lambda") ** 2 == pytest.approx(expected, rel=1e-4)

    def test_lambda_exceeds_unweighted(self, small_grid, rng):
        f = random_distribution(small_grid, rng)
        assert sobolev_norm(f, 1, "lambda") > sobolev_norm(f, 1, "mixed")
        assert sobolev_norm(f, 1, "lambda-x") > sobolev_norm(f, 1, "x")

    def test_vector_norm(self):
        grid = SpectralGrid(d_x=1, N_x=8, N_v=4)
        F = VectorField3.zeros(grid)
        F.coeffs[1, 1] = 0.5
        F.coeffs[1, -1] = 0.5
        assert sobolev_norm_vector(F, 0) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
        assert sobolev_norm_vector(F, 1) == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-13)

    def test_unknown_mode_rejected(self, small_grid, rng):
        with pytest.raises(ValueError):
            sobolev_norm(random_distribution(small_grid, rng), 1, "bogus")


class TestDerivatives:
    def test_grad_x_of_cosine_is_minus_sine(self):
        grid = SpectralGrid(d_x=1, N_x=8, N_v=4)
        f = cosine_mode(grid)
        df = grad_x(f, 0)
        x = np.arange(grid.N_x) * grid.L_x / grid.N_x
        values = x_to_values(df.coeffs[..., 0, 0, 0], grid)
        np.testing.assert_allclose(values, -np.sin(x), atol=1e-13)

    def test_grad_x_direction_out_of_range(self, small_grid, rng):
        with pytest.raises(ValueError):
            grad_x(random_distribution(small_grid, rng), 1)

    def test_grad_v_mult_v_adjoint(self, small_grid, rng):
        # integration by parts: <v_i f, h> = <f, v_i h>, <d_v f, h> = <f, (v - d_v) h>;
        # exact once the top Hermite mode is empty so nothing is truncated
        f = random_distribution(small_grid, rng)
        h = random_distribution(small_grid, rng)
        for arr in (f.coeffs, h.coeffs):
            arr[..., -1, :, :] = 0.0
            arr[..., :, -1, :] = 0.0
            arr[..., :, :, -1] = 0.0
        assert inner_product(mult_v(f, 1), h) == pytest.approx(
            inner_product(f, mult_v(h, 1)), rel=1e-12
        )
        lhs = inner_product(grad_v(f, 2), h)
        rhs = inner_product(f, mult_v(h, 2)) - inner_product(f, grad_v(h, 2))
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestHelmholtz:
    def test_decomposition_reassembles(self, small_grid, rng):
        F = random_vector(small_grid, rng)
        grad, df, mean = helmholtz_decompose(F)
        zero = (slice(None),) + (0,) * small_grid.d_x
        total = grad.coeffs + df.coeffs
        total[zero] += mean
        np.testing.assert_allclose(total, F.coeffs, atol=1e-14)

    def test_parts_orthogonal(self, small_grid, rng):
        F = random_vector(small_grid, rng)
        grad, df, _ = helmholtz_decompose(F)
        assert abs(vector_inner(grad, df)) < 1e-12

    def test_divergence_free_part(self, small_grid, rng):
        F = random_vector(small_grid, rng)
        _, df, _ = helmholtz_decompose(F)
        assert np.max(np.abs(divergence(df))) < 1e-13

    def test_leray_projection(self, small_grid, rng):
        F = random_vector(small_grid, rng)
        P = leray_project(F)
        assert np.max(np.abs(divergence(P))) < 1e-13
        # idempotent and keeps the mean
        PP = leray_project(P)
        np.testing.assert_allclose(PP.coeffs, P.coeffs, atol=1e-14)
        zero = (slice(None),) + (0,) * small_grid.d_x
        np.testing.assert_allclose(P.coeffs[zero], F.coeffs[zero], atol=1e-14)

    def test_curl_of_gradient_vanishes(self, small_grid, rng):
        F = random_vector(small_grid, rng)
        grad, _, _ = helmholtz_decompose(F)
        assert np.max(np.abs(curl(grad).coeffs)) < 1e-13

    def test_curl_pairing_skew(self, small_grid, rng):
        a = random_vector(small_grid, rng)
        b = random_vector(small_grid, rng)
        assert vector_inner(a, curl(b)) == pytest.approx(vector_inner(curl(a), b), rel=1e-12)
