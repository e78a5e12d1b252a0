import numpy as np
import pytest

from vmblimits.collisions import moments
from vmblimits.diagnostics import conserved_quantities
from vmblimits.grid import SpectralGrid, divergence, x_to_coeffs
from vmblimits.initial import InitialData, build_state
from vmblimits.integrator import KineticState, gauss_residual_field
from vmblimits.regime import ScalingRegime


@pytest.fixture()
def grid():
    return SpectralGrid(d_x=1, N_x=16, N_v=6)


@pytest.fixture()
def regime():
    return ScalingRegime.from_preset("nsw", 0.2)


def rich_data(amp=0.05):
    return InitialData(
        u={1: (0.3 * amp, amp, 0.5j * amp), 2: (0.0, 0.2 * amp, 0.0)},
        theta={1: 0.4 * amp},
        n={1: 0.6 * amp, 3: 0.1 * amp},
        E={2: (0.0, amp, 0.0)},
        B={1: (0.0, 0.2 * amp, 0.7 * amp)},
    )


class TestWellPrepared:
    def test_velocity_divergence_free(self, grid, regime):
        f, g, E, B = build_state(rich_data(), grid, regime)
        u = moments(f).flux
        div = np.zeros(grid.x_shape, dtype=complex)
        for i in range(3):
            div += 1j * grid.k3[i] * u[i]
        assert np.max(np.abs(div)) < 1e-14

    def test_boussinesq_between_density_and_temperature(self, grid, regime):
        f, _, _, _ = build_state(rich_data(), grid, regime)
        m = moments(f)
        combo = m.density + m.theta
        zero = (0,) * grid.d_x
        combo[zero] = 0.0  # means are set by the invariants, not by Boussinesq
        assert np.max(np.abs(combo)) < 1e-14

    def test_gauss_constraint_enforced(self, grid, regime):
        f, g, E, B = build_state(rich_data(), grid, regime)
        state = KineticState(f, g, E, B, 0.0)
        assert np.max(np.abs(gauss_residual_field(state, regime))) < 1e-14

    def test_magnetic_field_solenoidal_and_mean_free(self, grid, regime):
        _, _, _, B = build_state(rich_data(), grid, regime)
        assert np.max(np.abs(divergence(B))) < 1e-14
        zero = (slice(None),) + (0,) * grid.d_x
        assert np.max(np.abs(B.coeffs[zero])) < 1e-14

    def test_current_is_scaled_ohm_closure(self, grid, regime):
        from vmblimits.initial import _ohm_current_modes

        f, g, E, B = build_state(rich_data(), grid, regime, sigma=1.0)
        m = moments(f)
        n = moments(g).density
        expected = regime.epsilon * _ohm_current_modes(
            n, m.flux, E.coeffs, B.coeffs, grid, regime, 1.0
        )
        np.testing.assert_allclose(moments(g).flux, expected, atol=1e-14)

    def test_conserved_integrals_start_at_zero(self, grid, regime):
        f, g, E, B = build_state(rich_data(), grid, regime)
        state = KineticState(f, g, E, B, 0.0)
        conserved = conserved_quantities(state, regime)
        for name, value in conserved.items():
            assert abs(value) < 1e-13, name


class TestRawData:
    def test_unprepared_keeps_compressible_part(self, grid, regime):
        data = rich_data()
        data.well_prepared = False
        f, _, _, _ = build_state(data, grid, regime)
        u = moments(f).flux
        div = np.zeros(grid.x_shape, dtype=complex)
        for i in range(3):
            div += 1j * grid.k3[i] * u[i]
        assert np.max(np.abs(div)) > 1e-6

    def test_conjugate_mode_filled(self, grid, regime):
        data = InitialData(theta={2: 0.1 + 0.05j}, well_prepared=False)
        f, _, _, _ = build_state(data, grid, regime)
        theta = moments(f).theta
        assert theta[2] == pytest.approx(0.1 + 0.05j)
        assert theta[-2] == pytest.approx(0.1 - 0.05j)

    def test_mode_outside_band_rejected(self, grid, regime):
        data = InitialData(theta={grid.N_x // 3 + 1: 0.1})
        with pytest.raises(ValueError, match="resolved band"):
            build_state(data, grid, regime)

    def test_key_dimension_mismatch(self, regime):
        grid2 = SpectralGrid(d_x=2, N_x=8, N_v=6)
        data = InitialData(theta={(1, 0, 0): 0.1})
        with pytest.raises(ValueError, match="dimension"):
            build_state(data, grid2, regime)

    def test_two_dimensional_keys(self, regime):
        grid2 = SpectralGrid(d_x=2, N_x=8, N_v=6)
        data = InitialData(u={(1, 1): (0.0, 0.1, 0.0)})
        f, _, _, _ = build_state(data, grid2, regime)
        u = moments(f).flux
        div = np.zeros(grid2.x_shape, dtype=complex)
        for i in range(3):
            div += 1j * grid2.k3[i] * u[i]
        assert np.max(np.abs(div)) < 1e-14
