import math

import numpy as np
import pytest

from vmblimits import hermite

from oracles import gauss_rule, hermite_value


def test_basis_values_match_reference():
    points = np.array([-2.5, -0.3, 0.0, 1.0, 2.0, 3.7])
    table = hermite.eval_functions(8, points)
    for n in range(8):
        np.testing.assert_allclose(table[:, n], hermite_value(n, points), rtol=0, atol=1e-12)


def test_specific_basis_values():
    assert hermite.eval_functions(3, np.array([2.0]))[0, 2] == pytest.approx(
        3.0 / math.sqrt(2.0), abs=1e-14
    )
    assert hermite.eval_functions(4, np.array([2.0]))[0, 3] == pytest.approx(
        2.0 / math.sqrt(6.0), abs=1e-14
    )


def test_quadrature_weights_normalized():
    _, w = hermite.gauss_hermite(17)
    assert abs(w.sum() - 1.0) < 1e-13


def test_quadrature_matches_reference_rule():
    nodes, weights = hermite.gauss_hermite(12)
    ref_nodes, ref_weights = gauss_rule(12)
    np.testing.assert_allclose(nodes, ref_nodes, atol=1e-12)
    np.testing.assert_allclose(weights, ref_weights, atol=1e-14)


def test_orthonormality_under_quadrature():
    n_modes = 12
    nodes, weights = hermite.gauss_hermite(2 * n_modes)
    table = hermite.eval_functions(n_modes, nodes)
    gram = table.T @ (weights[:, None] * table)
    np.testing.assert_allclose(gram, np.eye(n_modes), atol=1e-12)


def test_mult_t_matches_pointwise_product(rng):
    n = 7
    coeffs = rng.standard_normal((n, n, n))
    shifted = hermite.mult_t(coeffs, axis=-2)
    nodes, weights = hermite.gauss_hermite(2 * n)
    table = hermite.eval_functions(n, nodes)
    # project t * f onto the basis along the middle axis by quadrature
    vals = np.einsum("abc,qb->aqc", coeffs, table)
    vals *= nodes[None, :, None]
    back = np.einsum("aqc,qb,q->abc", vals, table, weights)
    # the up-shift out of the top mode is dropped by design
    expected = back.copy()
    np.testing.assert_allclose(shifted[:, : n - 1, :], expected[:, : n - 1, :], atol=1e-12)
    # top retained mode keeps only the down-coupling from below
    np.testing.assert_allclose(
        shifted[:, n - 1, :], math.sqrt(n - 1.0) * coeffs[:, n - 2, :], atol=1e-12
    )


def test_ddt_is_downshift(rng):
    n = 6
    coeffs = rng.standard_normal((2, n, n, n))
    out = hermite.ddt(coeffs, axis=-1)
    for m in range(n - 1):
        np.testing.assert_allclose(
            out[..., m], math.sqrt(m + 1.0) * coeffs[..., m + 1], atol=1e-14
        )
    assert np.all(out[..., -1] == 0.0)


def test_transform_round_trip(rng):
    n_modes, n_nodes = 6, 12
    synthesis, analysis = hermite.transform_matrices(n_modes, n_nodes)
    coeffs = rng.standard_normal((n_modes, n_modes, n_modes))
    values = hermite.to_values(coeffs, synthesis)
    back = hermite.to_coeffs(values, analysis)
    np.testing.assert_allclose(back, coeffs, atol=2e-14)


def test_analysis_is_left_inverse():
    synthesis, analysis = hermite.transform_matrices(5, 10)
    np.testing.assert_allclose(analysis @ synthesis, np.eye(5), atol=1e-13)


def test_ladder_values():
    np.testing.assert_allclose(hermite.ladder(5), np.sqrt([1.0, 2.0, 3.0, 4.0]))
