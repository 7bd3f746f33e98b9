"""Tests for the Newton iteration and the sparse eigensolver."""

import math

import numpy as np
import pytest
import scipy.sparse as sps

from odp.core.errors import ConvergenceError
from odp.numerics.eigen import dense_smallest_eigenpairs, gershgorin_lower_bound, smallest_eigenpairs
from odp.numerics.newton import damped_newton


def _laplacian(n):
    return sps.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")


def test_damped_newton_solves_scalar_system():
    """x^3 = 8 componentwise."""
    result = damped_newton(
        lambda x: x ** 3 - 8.0,
        lambda x: sps.diags(3.0 * x ** 2),
        np.array([1.0, 5.0]),
    )
    np.testing.assert_allclose(result.x, 2.0, rtol=1e-12)
    assert result.iterations > 0
    assert result.history[0] > result.history[-1]


def test_damped_newton_reports_failure():
    """x^2 + 1 = 0 has no real root."""
    with pytest.raises(ConvergenceError) as info:
        damped_newton(
            lambda x: x ** 2 + 1.0,
            lambda x: sps.diags(2.0 * x),
            np.array([0.5]),
            settings={"max_iter": 5},
        )
    assert info.value.iterations > 0


def test_smallest_eigenpairs_of_discrete_laplacian():
    n = 200
    A = _laplacian(n)
    mass = np.ones(n)
    values, vectors = smallest_eigenpairs(A, mass, 3)
    exact = [2.0 - 2.0 * math.cos(j * math.pi / (n + 1)) for j in (1, 2, 3)]
    np.testing.assert_allclose(values, exact, rtol=1e-10)
    np.testing.assert_allclose(vectors.T @ (mass[:, None] * vectors), np.eye(3), atol=1e-10)
    assert np.all(vectors[:, 0] > 0)


def test_sparse_and_dense_agree_with_mass():
    n = 120
    A = _laplacian(n) + sps.diags(np.linspace(-1.0, 1.0, n))
    mass = np.linspace(0.5, 2.0, n)
    sparse_values, _ = smallest_eigenpairs(A, mass, 2)
    dense_values, _ = dense_smallest_eigenpairs(A, mass, 2)
    np.testing.assert_allclose(sparse_values, dense_values, rtol=1e-9)
    assert gershgorin_lower_bound(A, mass) <= sparse_values[0]
