"""Tests for the mode-decomposed linearized Dirichlet operator."""

import numpy as np
import pytest

from odp.core.errors import ConfigurationError
from odp.geometry.grid import k_norm
from odp.numerics.eigen import smallest_eigenpairs
from odp.spectrum.dirichlet import (
    dense_oracle,
    dirichlet_form_identity,
    margin_row,
    mode_operator,
    mode_spectrum_table,
    principal_dirichlet_pair,
)


def test_principal_pair(sphere_profile):
    """tau < 0 with a one-signed z of unit norm vanishing on the boundary."""
    pair = principal_dirichlet_pair(sphere_profile)
    assert pair.tau < 0.0
    assert pair.morse_index == 1
    assert pair.z[0] == 0.0
    assert np.min(pair.z) >= -1e-10 * np.max(pair.z)
    assert k_norm(pair.z, sphere_profile.grid, 2) == pytest.approx(1.0, rel=1e-12)
    assert 0.0 < pair.l2_norm < 1.0


def test_sparse_eigensolver_matches_dense_oracle(sphere_profile):
    op = mode_operator(sphere_profile, 0)
    sparse_values, _ = smallest_eigenpairs(op.matrix, op.mass, 2)
    np.testing.assert_allclose(sparse_values, dense_oracle(op, 2), rtol=1e-8, atol=1e-10)


def test_dense_oracle_size_limit(params_base):
    from odp.geometry.grid import make_sphere_grid
    from odp.radial.solver import RadialProfile

    grid = make_sphere_grid(params_base.k, 2, n=1000)
    profile = RadialProfile(grid, np.zeros(grid.n + 1), params_base, 0.0, 0.0)
    with pytest.raises(ConfigurationError, match="Dense oracle"):
        dense_oracle(mode_operator(profile, 1))


def test_mode_operator_symmetric(sphere_profile):
    for degree in (0, 2, 5):
        assert mode_operator(sphere_profile, degree).symmetry_error() < 1e-12


def test_dirichlet_form_identity(sphere_profile):
    q, mismatch = dirichlet_form_identity(sphere_profile)
    assert q < 0.0
    assert mismatch < 1e-8


def test_mode_eigenvalues_increase_with_degree(sphere_profile):
    table = mode_spectrum_table(sphere_profile, [0, 1, 2, 4])
    assert list(table.columns) == ["l", "mu", "eig1", "eig2"]
    assert table["mu"].tolist() == [0.0, 1.0, 4.0, 16.0]
    assert np.all(np.diff(table["eig1"].to_numpy()) > 0)
    assert np.all(table["eig2"] > table["eig1"])


def test_margin_row(sphere_profile, dihedral2):
    row = margin_row(sphere_profile, dihedral2)
    assert row["lambda"] == sphere_profile.lam
    eigs = [row[f"eig_{degree}"] for degree in dihedral2.degrees]
    assert row["margin"] == min([row["second_radial"]] + eigs)
    assert "dirichlet_l1" in row
