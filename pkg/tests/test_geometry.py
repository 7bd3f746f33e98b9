"""Tests for parameters, sphere metric, harmonics, grids and symmetry groups."""

import math

import numpy as np
import pytest

from odp.core.errors import ConfigurationError
from odp.geometry.grid import (
    closed_form_volume,
    dirichlet_energy,
    k_norm,
    make_exterior_grid,
    make_sphere_grid,
    stiffness_matrix,
    volume_check,
)
from odp.geometry.harmonics import angular_mean, sphere_eigen
from odp.geometry.metric import boundary_curvature, mean_curvature, metric_factors
from odp.geometry.params import ProblemParams
from odp.geometry import symmetry
from odp.geometry.symmetry import configured_max_degree, dihedral_group, group_from_spec


def test_params_reject_supercritical_exponent():
    """p must stay below (d+2)/(d-2) for d >= 3."""
    with pytest.raises(ConfigurationError, match=r"\(d\+2\)/\(d-2\)"):
        ProblemParams.create(d=3, p=5.0, k=0.1, lam=1.0)
    assert ProblemParams.create(d=3, p=4.9, k=0.1, lam=1.0).p == 4.9


def test_params_reject_large_k():
    with pytest.raises(ConfigurationError):
        ProblemParams.create(d=2, p=3.0, k=3.5, lam=1.0)


def test_params_with_lambda_and_k():
    params = ProblemParams.create(d=2, p=3.0, k=0.1, lam=1.0)
    assert params.with_lambda(2.0).lam == 2.0
    assert params.with_k(0.2).k == 0.2
    assert params.to_dict() == {"d": 2, "p": 3.0, "k": 0.1, "lambda": 1.0}


def test_metric_factors_vanish_beyond_pole():
    k = 0.5
    s, c = metric_factors(k, np.array([1.0, math.pi / k, 7.0]))
    assert s[0] == pytest.approx(math.sin(0.5) / 0.5)
    assert c[0] == pytest.approx(math.cos(0.5))
    assert s[1] == 0.0 and s[2] == 0.0


def test_metric_factors_examples():
    s, c = metric_factors(1.0, math.pi / 2)
    assert s == pytest.approx(1.0, abs=1e-15)
    assert c == pytest.approx(0.0, abs=1e-15)
    assert metric_factors(0.5, 2.0 * math.pi) == (0.0, 0.0)


def test_metric_factors_flat_limit():
    r = np.array([1.0, 2.0, 10.0])
    s, c = metric_factors(1e-6, r)
    np.testing.assert_allclose(s, r, rtol=0.0, atol=1e-10)
    np.testing.assert_allclose(c, 1.0, rtol=0.0, atol=1e-10)


def test_mean_curvature_examples():
    assert mean_curvature(math.pi / 4, 3) == pytest.approx(math.pi / 2, rel=1e-14)
    assert mean_curvature(1e-6, 2) == pytest.approx(1.0, abs=1e-10)
    values = [mean_curvature(k, 2) for k in np.linspace(0.01, math.pi / 2, 50)]
    assert np.all(np.diff(values) < 0)
    with pytest.raises(ConfigurationError):
        mean_curvature(math.pi, 2)


def test_boundary_curvature_matches_mean_curvature():
    for k in (0.05, 0.2, 1.0):
        assert boundary_curvature(k, 3, 1.0) == pytest.approx(mean_curvature(k, 3))
    assert mean_curvature(0.01, 2) == pytest.approx(1.0, abs=1e-4)


def test_sphere_eigen():
    assert sphere_eigen(0, 2) == (0.0, 1)
    assert sphere_eigen(2, 2) == (4.0, 2)
    assert sphere_eigen(1, 3) == (2.0, 3)
    assert sphere_eigen(2, 3) == (6.0, 5)


def test_angular_mean():
    assert angular_mean(0, 2) == pytest.approx(1.0)
    assert abs(angular_mean(3, 2)) < 1e-14
    assert abs(angular_mean(2, 3)) < 1e-12


def test_sphere_grid_volumes():
    """Control volumes and quadrature reproduce the closed-form volume."""
    grid = make_sphere_grid(0.2, 2, n=401)
    assert grid.n == 402
    assert grid.r_inner == 1.0
    assert grid.r_end == pytest.approx(math.pi / 0.2)
    assert volume_check(grid) < 1e-10
    assert np.sum(grid.cell_volumes) == pytest.approx(closed_form_volume(grid), rel=1e-12)


def test_exterior_grid_volume():
    grid = make_exterior_grid(3, 10.0, 200)
    assert np.sum(grid.cell_volumes) == pytest.approx((1000.0 - 1.0) / 3.0, rel=1e-12)


def test_sphere_grid_rejects_bad_ball():
    with pytest.raises(ConfigurationError):
        make_sphere_grid(2.0, 2, n=100, r_inner=2.0)


def test_stiffness_matrix_symmetric_and_consistent():
    grid = make_sphere_grid(0.3, 2, n=100)
    K = stiffness_matrix(grid)
    assert abs(K - K.T).max() < 1e-14
    assert np.max(np.abs(K @ np.ones(grid.n + 1))) < 1e-12
    u = np.sin(grid.nodes)
    assert float(u @ (K @ u)) == pytest.approx(dirichlet_energy(grid, u), rel=1e-12)


def test_dihedral_group():
    group = dihedral_group(3)
    assert group.degrees == [3, 6, 9, 12, 15]
    assert group.first_degree == 3
    assert group.first_mult == 1
    assert group.name == "dihedral:3"


def test_group_spec_violations():
    with pytest.raises(ConfigurationError, match="i_1"):
        group_from_spec("modes:1/1")
    with pytest.raises(ConfigurationError, match="even"):
        group_from_spec("modes:2/2")
    with pytest.raises(ConfigurationError):
        group_from_spec("cyclic:4")
    with pytest.raises(ConfigurationError):
        dihedral_group(1)
    assert group_from_spec("modes:2/1,4/3", d=3).allowed_modes == ((2, 1), (4, 3))


def test_k_norm_of_constant_on_flat_interval():
    """u = 1 on [1, 2] with weight r: sqrt(integral of r dr) = sqrt(1.5)."""
    grid = make_exterior_grid(2, 2.0, 200)
    assert k_norm(np.ones(grid.n + 1), grid, 2) == pytest.approx(math.sqrt(1.5), rel=1e-12)
    assert k_norm(np.zeros(grid.n + 1), grid, 2) == 0.0


def test_k_norm_refinement():
    """The norm of a smooth profile settles under grid doubling."""
    norms = []
    for n in (2000, 4000, 8000, 16000):
        grid = make_exterior_grid(2, 2.0, n)
        norms.append(k_norm(np.cos(grid.nodes), grid, 2))
    gaps = np.abs(np.diff(norms))
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 1e-8


def test_dihedral_truncation_follows_dtn_config(monkeypatch):
    assert configured_max_degree() == 16
    assert group_from_spec("dihedral:2").degrees[-1] == 16

    monkeypatch.setattr(symmetry, "solver_section", lambda name: {"max_degree": 8})
    assert group_from_spec("dihedral:2").degrees == [2, 4, 6, 8]
    assert group_from_spec("modes:2/1,20/1").degrees == [2, 20]

    monkeypatch.setattr(symmetry, "solver_section", lambda name: {"max_degree": 1})
    with pytest.raises(ConfigurationError, match="max_degree"):
        dihedral_group(2)
