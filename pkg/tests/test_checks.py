"""The collision property suite: passing backends and flawed fixtures."""

import numpy as np
import pytest

from vmblimits.checks import (
    FLAW_NAMES,
    PROPERTY_NAMES,
    collision_property_suite,
    failed_properties,
)
from vmblimits.collisions import CollisionBackend
from vmblimits.grid import SpectralGrid


@pytest.fixture(scope="module")
def grid():
    return SpectralGrid(d_x=1, N_x=8, N_v=6)


class TestPassingBackends:
    @pytest.mark.parametrize("kind", ["bgk", "spectral-diagonal"])
    def test_all_properties_hold(self, grid, kind):
        backend = CollisionBackend(grid, kind)
        results = collision_property_suite(backend)
        assert [r.name for r in results] == list(PROPERTY_NAMES)
        assert failed_properties(results) == []
        assert all(np.isfinite(r.measure) for r in results)

    def test_custom_rates_pass(self, grid):
        rates = np.arange(3 * (grid.N_v - 1) + 1, dtype=float) * 2.0
        rates[0] = 1.0
        backend = CollisionBackend(grid, "spectral-diagonal", rates=rates)
        results = collision_property_suite(backend)
        assert failed_properties(results) == []
        coercivity = next(r for r in results if r.name == "coercivity")
        assert coercivity.measure >= 1.0 - 1e-12

    def test_deterministic_for_seed(self, grid):
        backend = CollisionBackend(grid, "bgk")
        a = collision_property_suite(backend, seed=3)
        b = collision_property_suite(backend, seed=3)
        assert [r.measure for r in a] == [r.measure for r in b]

    def test_other_seed_still_passes(self, grid):
        backend = CollisionBackend(grid, "bgk")
        results = collision_property_suite(backend, seed=12345)
        assert failed_properties(results) == []

    def test_results_carry_descriptions(self, grid):
        backend = CollisionBackend(grid, "bgk")
        for res in collision_property_suite(backend):
            assert res.detail
            assert res.tolerance >= 0.0


class TestFlawedFixtures:
    def test_broken_kernel_names_the_kernel_check(self, grid):
        backend = CollisionBackend(grid, "bgk")
        results = collision_property_suite(backend, flaw="broken-kernel")
        failed = {r.name for r in failed_properties(results)}
        assert "kernel-annihilation" in failed
        assert "self-adjointness" not in failed
        kernel = next(r for r in results if r.name == "kernel-annihilation")
        assert kernel.measure == pytest.approx(1e-3, rel=1e-6)

    def test_broken_adjoint_names_the_symmetry_check(self, grid):
        backend = CollisionBackend(grid, "bgk")
        results = collision_property_suite(backend, flaw="broken-adjoint")
        failed = {r.name for r in failed_properties(results)}
        assert "self-adjointness" in failed
        assert "kernel-annihilation" not in failed

    def test_unknown_flaw(self, grid):
        backend = CollisionBackend(grid, "bgk")
        with pytest.raises(ValueError, match="unknown flaw"):
            collision_property_suite(backend, flaw="broken-everything")

    def test_flaw_names_frozen(self):
        assert FLAW_NAMES == ("broken-kernel", "broken-adjoint")
