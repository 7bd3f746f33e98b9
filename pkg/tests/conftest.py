"""Pytest configuration and fixtures."""

import pytest
from pathlib import Path
import sys

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

SMALL_K = 0.2
SMALL_LAMBDA = 1.0
SMALL_N_R = 400
SMALL_N_EXTERIOR = 1200


@pytest.fixture(scope="session")
def params_base():
    """d=2, p=3 at the small-grid curvature."""
    from odp.geometry.params import ProblemParams

    return ProblemParams.create(d=2, p=3.0, k=SMALL_K, lam=SMALL_LAMBDA)


@pytest.fixture(scope="session")
def dihedral2():
    from odp.geometry.symmetry import dihedral_group

    return dihedral_group(2)


@pytest.fixture(scope="session")
def exterior_profile(params_base):
    """Limit profile at lambda=1 on a reduced exterior grid."""
    from odp.exterior.profile import solve_exterior_radial

    return solve_exterior_radial(params_base, n=SMALL_N_EXTERIOR)


@pytest.fixture(scope="session")
def sphere_grid(params_base):
    from odp.geometry.grid import make_sphere_grid

    return make_sphere_grid(params_base.k, params_base.d, n=SMALL_N_R)


@pytest.fixture(scope="session")
def sphere_profile(params_base, sphere_grid, exterior_profile):
    """u_{k,lambda} at k=0.2, lambda=1 on 400 cells."""
    from odp.radial.solver import solve_from_limit

    return solve_from_limit(params_base, sphere_grid, exterior_profile)


@pytest.fixture(scope="session")
def profile_cache(params_base, sphere_grid, sphere_profile):
    from odp.radial.solver import ProfileCache

    cache = ProfileCache(params_base, grid=sphere_grid)
    cache.add(sphere_profile)
    return cache


@pytest.fixture(scope="session")
def annulus_grid(params_base, sphere_grid):
    """Wedge grid for n=2 with 16 points on the full circle."""
    from odp.annulus2d.field import make_annulus_grid

    return make_annulus_grid(params_base.k, 2, SMALL_N_R, 16, radial=sphere_grid)
