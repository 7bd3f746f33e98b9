"""Tests for the d = 2 annulus: perturbations, pulled-back solve, DtN map and branch."""

import math

import numpy as np
import pandas as pd
import pytest

from odp.annulus2d.branch import BranchPoint, branch_rate, trace_branch
from odp.annulus2d.dtn_map import evaluate_dtn, jacobian_check, nonlinear_dtn_F
from odp.annulus2d.field import PerturbationField, make_annulus_grid
from odp.annulus2d.metric import domain_outline, pullback_metric
from odp.annulus2d.solver import assemble_operator, solve_perturbed
from odp.core.errors import ConfigurationError, SolverError
from odp.geometry.grid import make_sphere_grid
from odp.radial.solver import solve_from_limit


def test_perturbation_field_validation():
    with pytest.raises(ConfigurationError):
        PerturbationField((0.3,), 2)
    with pytest.raises(ConfigurationError):
        PerturbationField((0.01,), 1)
    v = PerturbationField.single_mode(3, 2, 0.01, n_modes=4)
    assert v.fourier == (0.0, 0.01, 0.0, 0.0)
    assert v.amplitude == 0.0
    assert v(np.array([0.0]))[0] == pytest.approx(0.01)
    assert PerturbationField.zero(2, 3).is_zero()


def test_grid_requires_multiple_of_4n(sphere_grid):
    with pytest.raises(ConfigurationError, match="multiple of 4n"):
        make_annulus_grid(0.2, 2, 400, 12, radial=sphere_grid)


def test_wedge_unfold_and_projection(annulus_grid):
    """Dihedral samples on the wedge unfold to the circle and project onto cos(j n theta)."""
    grid = annulus_grid
    assert grid.n_wedge == 5
    wedge = 0.3 * np.cos(2 * grid.theta) + 0.1 * np.cos(4 * grid.theta)
    np.testing.assert_allclose(
        grid.to_full(wedge),
        0.3 * np.cos(2 * grid.full_theta) + 0.1 * np.cos(4 * grid.full_theta),
        atol=1e-14,
    )
    assert grid.project(wedge, 1) == pytest.approx(0.3)
    assert grid.project(wedge, 2) == pytest.approx(0.1)
    assert grid.wedge_mean(wedge) == pytest.approx(0.0, abs=1e-14)


def test_pullback_metric_at_zero_is_round():
    k = 0.2
    r = np.array([1.0, 1.3, 2.0])
    theta = np.linspace(0.0, math.pi / 2, 5)
    metric = pullback_metric(PerturbationField.zero(2), k, r, theta)
    np.testing.assert_allclose(metric.g_rr, 1.0)
    np.testing.assert_allclose(metric.g_rt, 0.0)
    np.testing.assert_allclose(metric.g_tt, (np.sin(k * r) / k)[:, None] ** 2 * np.ones((1, 5)))


def test_domain_outline_radius():
    v = PerturbationField((0.05,), 2)
    outline = domain_outline(v, 0.2, n_points=9)
    assert outline["rho"].iloc[0] == pytest.approx(1.05)
    assert outline["rho"].max() == pytest.approx(1.05)
    assert outline["rho"].min() == pytest.approx(0.95)


def test_operator_symmetric(annulus_grid):
    op = assemble_operator(annulus_grid, PerturbationField((0.02, 0.005), 2), 0.2)
    assert op.symmetry_error() < 1e-10
    assert np.all(op.mass > 0.0)


def test_zero_perturbation_reproduces_radial(annulus_grid, sphere_profile):
    solution = solve_perturbed(PerturbationField.zero(2), sphere_profile.lam, sphere_profile, annulus_grid)
    assert np.max(np.abs(solution.perturbation(sphere_profile))) < 1e-8
    np.testing.assert_allclose(solution.boundary_trace, sphere_profile.du_at_1, rtol=1e-8)


def test_F_vanishes_at_zero(annulus_grid, sphere_profile):
    F = nonlinear_dtn_F(PerturbationField.zero(2), sphere_profile.lam, sphere_profile, annulus_grid)
    assert F.shape == (annulus_grid.n_wedge,)
    assert np.max(np.abs(F)) < 1e-8


def test_F_mean_free_on_perturbed_boundary(annulus_grid, sphere_profile):
    v = PerturbationField((0.01,), 2)
    data = evaluate_dtn(v, sphere_profile.lam, sphere_profile, annulus_grid)
    assert data.grid.wedge_mean(data.F, data.ds) == pytest.approx(0.0, abs=1e-12)
    assert data.mean > 0.0
    assert data.constancy > 0.0


def test_evaluate_dtn_checks_order(annulus_grid, sphere_profile):
    with pytest.raises(ConfigurationError):
        evaluate_dtn(PerturbationField((0.01,), 3), sphere_profile.lam, sphere_profile, annulus_grid)


def test_solve_perturbed_checks_lambda(annulus_grid, sphere_profile):
    with pytest.raises(SolverError):
        solve_perturbed(PerturbationField.zero(2), 2.0, sphere_profile, annulus_grid)


def test_jacobian_check_rejects_increasing_eps(annulus_grid, sphere_profile):
    with pytest.raises(ConfigurationError):
        jacobian_check(sphere_profile, annulus_grid, 1, [1e-3, 2e-3])


def test_linearization_matches_radial_dtn(annulus_grid, sphere_profile):
    """Central differences of F approach u'(1) h_n cos(n theta)."""
    table = jacobian_check(sphere_profile, annulus_grid, 1, [4e-3, 2e-3, 1e-3])
    assert list(table.columns) == [
        "eps",
        "fd_norm",
        "expected_norm",
        "abs_error",
        "rel_error",
        "increment",
        "observed_order",
    ]
    assert table.attrs["degree"] == 2
    assert table["increment"].iloc[2] < table["increment"].iloc[1]
    assert table["observed_order"].iloc[-1] >= 1.9
    assert table["rel_error"].iloc[-1] < 1e-2


def test_linearization_error_on_finer_radial_grid(params_base, exterior_profile):
    """On 800 radial cells the Richardson-extrapolated quotient matches u'(1) h_n to 1e-3."""
    grid = make_sphere_grid(params_base.k, params_base.d, n=800)
    profile = solve_from_limit(params_base, grid, exterior_profile)
    annulus = make_annulus_grid(params_base.k, 2, 800, 16, radial=grid)
    table = jacobian_check(profile, annulus, 1, [4e-3, 2e-3, 1e-3])
    assert table["observed_order"].iloc[-1] >= 1.9
    assert table.attrs["extrapolated_rel_error"] < 1e-3


def test_branch_point_row():
    point = BranchPoint(
        amplitude=0.01,
        lam=0.8,
        coefficients=[0.01, 1e-4],
        F_residual=1e-10,
        neumann_constant=1.1,
        neumann_stddev=1e-11,
        iterations=3,
        values=np.zeros(3),
    )
    row = point.to_row()
    assert list(row) == ["amplitude", "lambda", "a_1", "a_2", "F_residual", "neumann_constant", "neumann_stddev"]
    assert "values" not in point.to_dict()


def test_branch_rate_quadratic():
    a = np.array([1e-3, 2e-3, 4e-3, 8e-3])
    table = pd.DataFrame({"amplitude": a, "lambda": 0.8 + 3.0 * a ** 2})
    assert branch_rate(table, 0.8) == pytest.approx(2.0)
    assert math.isnan(branch_rate(table.iloc[:1], 0.8))


def test_trace_branch_rejects_bad_input(profile_cache, annulus_grid):
    with pytest.raises(ConfigurationError):
        trace_branch(profile_cache, annulus_grid, [-1e-3], 1.0)
    with pytest.raises(ConfigurationError):
        trace_branch(profile_cache, annulus_grid, [1e-3], 1.0, n_modes=0)
