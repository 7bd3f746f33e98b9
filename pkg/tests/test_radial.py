"""Tests for the radial Dirichlet problem on the sphere and its k -> 0 limit."""

import math

import numpy as np
import pytest

from odp.core.errors import ConfigurationError, ConvergenceError
from odp.radial import convergence, solver
from odp.radial.convergence import convergence_study, largest_converging_k, limit_distance, profile_bounds
from odp.radial.cutoff import cutoff_function, cutoff_guess, max_cutoff_slope
from odp.radial.solver import ProfileCache, continue_in_lambda, energy_identity, solve_radial, strong_residual

from conftest import SMALL_N_EXTERIOR, SMALL_N_R


def test_cutoff_function_band():
    k = 0.04
    inner, outer = math.pi / math.sqrt(k), 2.0 * math.pi / math.sqrt(k)
    r = np.array([1.0, inner, 0.5 * (inner + outer), outer, math.pi / k])
    chi = cutoff_function(k, r)
    assert chi[0] == 1.0 and chi[1] == 1.0
    assert chi[2] == pytest.approx(0.5)
    assert chi[3] == 0.0 and chi[4] == 0.0


def test_cutoff_slope_below_bound():
    for k in (0.01, 0.1, 0.5):
        assert max_cutoff_slope(k) < 1.0 / math.sqrt(k)


def test_cutoff_rejects_large_k():
    with pytest.raises(ConfigurationError):
        cutoff_function(1.5, np.array([1.0]))


def test_cutoff_guess_vanishes_on_boundary(exterior_profile, sphere_grid):
    guess = cutoff_guess(exterior_profile, sphere_grid)
    assert guess[0] == 0.0
    assert guess[-1] == 0.0
    assert np.max(guess) == pytest.approx(np.max(exterior_profile.values), rel=0.05)


def test_sphere_profile_solves_equation(sphere_profile):
    """Positive solution with small strong residual and the pole condition."""
    u = sphere_profile.values
    assert u[0] == 0.0
    assert np.min(u[1:]) > 0.0
    assert sphere_profile.residual_norm <= 1e-10
    assert strong_residual(sphere_profile.grid, sphere_profile.params, u) <= 1e-10
    assert sphere_profile.du_at_1 > 0.0
    assert abs(sphere_profile.pole_derivative()) < 1e-3


def test_sphere_energy_identity(sphere_profile):
    assert energy_identity(sphere_profile) < 1e-8


def test_sphere_profile_near_limit(sphere_profile, exterior_profile):
    """At k = 0.2 the sphere profile is close to the limit profile."""
    distance = limit_distance(sphere_profile, exterior_profile)
    scale = math.sqrt(np.sum(sphere_profile.grid.cell_volumes * sphere_profile.values ** 2))
    assert distance < 0.3 * scale


def test_solve_radial_accepts_converged_guess(sphere_profile):
    again = solve_radial(sphere_profile.params, sphere_profile.grid, sphere_profile.values)
    np.testing.assert_array_equal(again.values, sphere_profile.values)


def test_solve_radial_rejects_mismatched_grid(params_base, sphere_profile):
    with pytest.raises(ConfigurationError):
        solve_radial(params_base.with_k(0.3), sphere_profile.grid, sphere_profile.values)
    with pytest.raises(ConfigurationError, match="nonnegative"):
        solve_radial(params_base, sphere_profile.grid, -np.ones(sphere_profile.grid.n + 1))


def test_profile_cache_continuation(params_base, sphere_grid, sphere_profile):
    cache = ProfileCache(params_base, grid=sphere_grid)
    cache.add(sphere_profile)
    assert cache.get(1.0) is sphere_profile
    moved = cache.get(1.1)
    assert len(cache) == 2
    assert moved.lam == 1.1
    assert moved.residual_norm <= 1e-10


def test_profile_cache_rejects_foreign_profile(params_base, sphere_profile):
    cache = ProfileCache(params_base.with_k(0.3), n=100)
    with pytest.raises(ConfigurationError):
        cache.add(sphere_profile)


def test_profile_bounds(sphere_profile):
    table = profile_bounds([sphere_profile], delta=1e-3)
    assert list(table.columns) == ["k", "lambda", "u_max", "r_at_max", "r_delta"]
    row = table.iloc[0]
    assert row["r_at_max"] < row["r_delta"] < math.pi / 0.2


def test_profile_cache_is_bounded(params_base, sphere_grid, sphere_profile):
    cache = ProfileCache(params_base, grid=sphere_grid, cache_size=2)
    cache.add(sphere_profile)
    cache.get(1.05)
    cache.get(1.1)
    assert len(cache) == 2
    assert 1.0 not in cache
    assert 1.05 in cache and 1.1 in cache


def test_continue_in_lambda(sphere_profile):
    profile = continue_in_lambda(sphere_profile, 2.0)
    assert profile.lam == 2.0
    assert profile.grid is sphere_profile.grid
    assert profile.residual_norm <= 1e-10
    assert np.max(profile.values) > np.max(sphere_profile.values)


def test_profile_cache_continues_from_seed(params_base, sphere_grid, monkeypatch):
    """When the cut-off start fails away from the seed, the cache marches in lambda from it."""
    original = solver.solve_from_limit

    def seed_only(params, grid=None, ext=None, settings=None):
        if params.lam != 1.0:
            raise ConvergenceError(f"no cut-off start at lambda={params.lam}")
        return original(params, grid, ext, settings)

    monkeypatch.setattr(solver, "solve_from_limit", seed_only)
    cache = ProfileCache(params_base, grid=sphere_grid)
    profile = cache.get(1.6)
    assert profile.lam == 1.6
    assert profile.residual_norm <= 1e-10
    assert 1.0 in cache and len(cache) == 2


def test_convergence_study_decreasing(params_base):
    table = convergence_study(params_base, [0.2, 0.1], n_exterior=SMALL_N_EXTERIOR)
    assert list(table["k"]) == [0.2, 0.1]
    assert table["failure"].isna().all()
    assert table["decreasing"].all()
    assert (table["residual"] <= 1e-10).all()
    e = table["error"].to_numpy()
    # e(k) = O(k^2)
    assert e[0] / e[1] > 3.0


def test_convergence_study_keeps_failed_row(params_base, monkeypatch):
    original = convergence.solve_radial

    def fail_at_first_k(params, grid, guess, settings=None):
        if params.k == 0.2:
            raise ConvergenceError("sphere: residual 1.7e-01 after 60 iterations")
        return original(params, grid, guess, settings)

    monkeypatch.setattr(convergence, "solve_radial", fail_at_first_k)
    table = convergence_study(params_base, [0.2, 0.1], n_exterior=SMALL_N_EXTERIOR)
    assert len(table) == 2
    assert "ConvergenceError" in table["failure"].iloc[0]
    assert np.isnan(table["error"].iloc[0])
    assert table["failure"].iloc[1] is None
    assert list(table["decreasing"]) == [False, True]


def test_largest_converging_k(params_base):
    assert largest_converging_k(params_base, [0.2, 3.0], n=SMALL_N_R) == 0.2
