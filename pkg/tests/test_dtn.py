"""Tests for the linearized Dirichlet-to-Neumann operator."""

from dataclasses import replace

import numpy as np
import pytest
import scipy.sparse as sps

from odp.core.errors import ConfigurationError, GridError
from odp.dtn.forms import pullback_trace_constant, quadratic_form_Q, quadratic_form_field, trace_inequality
from odp.dtn.modes import dtn_eigenvalue, dtn_value, mode_entry, solve_mode_bvp, steklov_fallback, steklov_schur
from odp.dtn.report import dtn_report, orthogonality_check
from odp.numerics.eigen import smallest_eigenpairs
from odp.spectrum.dirichlet import mode_operator, principal_dirichlet_pair


def test_mode_bvp_boundary_value(sphere_profile):
    psi, op, cond = solve_mode_bvp(sphere_profile, 2)
    assert psi[0] == 1.0
    assert psi[-1] == 0.0
    assert op.interior_residual(psi) < 1e-8
    assert cond > 1.0


def test_form_identity_per_mode(sphere_profile):
    """lam h W(1) equals the quadratic form of the boundary-value solution."""
    for degree in (2, 4, 8):
        entry = mode_entry(sphere_profile, degree)
        q = quadratic_form_Q(entry.psi, sphere_profile, degree)
        lhs = sphere_profile.lam * entry.h * sphere_profile.grid.boundary_measure
        assert lhs == pytest.approx(q, rel=1e-10, abs=1e-12)


def test_dtn_eigenvalues_increase_with_degree(sphere_profile):
    values = [dtn_eigenvalue(sphere_profile, degree) for degree in (2, 4, 6, 8)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_steklov_fallback_matches_direct_solve(sphere_profile):
    """The eigen-expansion Schur complement reproduces the direct boundary solve."""
    eta, psi, multipliers = steklov_fallback(sphere_profile, 4)
    entry = mode_entry(sphere_profile, 4)
    curvature = mode_operator(sphere_profile, 4).curvature
    assert eta - curvature == pytest.approx(entry.h, rel=1e-9, abs=1e-9)
    np.testing.assert_allclose(psi, entry.psi, atol=1e-9)
    assert abs(multipliers[0]) < 1e-10
    assert multipliers[1] == 0.0


def test_steklov_fallback_z_multiplier(sphere_profile):
    pair = principal_dirichlet_pair(sphere_profile)
    _, _, multipliers = steklov_fallback(sphere_profile, 2, pair)
    assert abs(multipliers[1]) < 1e-10


def test_steklov_schur_near_singular_operator(sphere_profile):
    """Shifted so the lowest Dirichlet eigenvalue is 1e-6 |t_1|, the deflated solve still matches the direct one."""
    op = mode_operator(sphere_profile, 4)
    t1 = smallest_eigenpairs(op.matrix, op.mass, 1)[0][0]
    shift = np.zeros(op.grid.n + 1)
    shift[op.interior] = (1.0 - 1e-6) * t1 * op.mass
    near = replace(op, full=(op.full - sps.diags(shift)).tocsr(), _lu=None)
    assert smallest_eigenpairs(near.matrix, near.mass, 1)[0][0] == pytest.approx(1e-6 * t1, rel=1e-3)

    schur, interior, correction = steklov_schur(near)
    psi = np.zeros(op.grid.n + 1)
    psi[0] = 1.0
    psi[near.interior] = interior
    assert near.interior_residual(psi) < 1e-8 * np.max(np.abs(psi))
    assert near.boundary_row(psi) == pytest.approx(schur, rel=1e-12)
    direct = near.solve_boundary(1.0)
    assert dtn_value(near, psi) == pytest.approx(dtn_value(near, direct), rel=1e-5)
    assert np.max(np.abs(correction)) < 1e-10 * np.max(np.abs(near.full[near.interior][:, [0]].toarray()))


def test_orthogonality_relations(sphere_profile):
    pair = principal_dirichlet_pair(sphere_profile)
    entry = mode_entry(sphere_profile, 2)
    res_z, res_flux = orthogonality_check(entry.psi, pair, sphere_profile, 2)
    assert res_z < 1e-12
    assert res_flux < 1e-12
    with pytest.raises(ConfigurationError, match="l >= 1"):
        orthogonality_check(entry.psi, pair, sphere_profile, 0)


def test_dtn_report(sphere_profile, dihedral2):
    report = dtn_report(sphere_profile, dihedral2)
    table = report.h_table()
    assert table["l"].tolist() == dihedral2.degrees
    assert report.sigma1 == pytest.approx(table["h"].min())
    assert report.index == int((table["h"] < 0).sum())
    assert report.h(2) == table["h"].iloc[0]
    assert report.identity_residuals["form_identity"] < 1e-8
    assert report.identity_residuals["green_boundary"] < 1e-10
    data = report.to_dict()
    assert data["group"] == "dihedral:2"
    assert len(data["entries"]) == len(dihedral2.degrees)


def test_quadratic_form_field_matches_modes(sphere_profile):
    """Q(phi(r) cos(l theta)) = pi Q^l(phi) on a uniform theta grid."""
    entry = mode_entry(sphere_profile, 2)
    theta = 2.0 * np.pi * np.arange(16) / 16
    field = entry.psi[:, None] * np.cos(2 * theta)[None, :]
    full = quadratic_form_field(field, sphere_profile)
    assert full == pytest.approx(np.pi * quadratic_form_Q(entry.psi, sphere_profile, 2), rel=1e-10)
    with pytest.raises(GridError):
        quadratic_form_field(entry.psi, sphere_profile)


def test_trace_inequality_random_profiles(sphere_grid):
    rng = np.random.default_rng(7)
    for degree in (0, 2, 3):
        for _ in range(5):
            psi = rng.normal(size=sphere_grid.n + 1)
            lhs, rhs, C = trace_inequality(psi, sphere_grid, 2, degree)
            assert lhs <= rhs
            assert C == pytest.approx(pullback_trace_constant(sphere_grid.k, 2))
