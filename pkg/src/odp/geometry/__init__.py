"""Coordinates, metric factors, radial grids and symmetry data for S^d(k) minus B_1."""

from odp.geometry.params import ProblemParams
from odp.geometry.metric import (
    metric_factors,
    mean_curvature,
    boundary_curvature,
    unit_sphere_measure,
)
from odp.geometry.harmonics import sphere_eigen, angular_mean
from odp.geometry.grid import (
    RadialGrid,
    make_sphere_grid,
    make_exterior_grid,
    stiffness_matrix,
    k_norm,
    volume_check,
)
from odp.geometry.symmetry import SymmetryGroup, dihedral_group, group_from_spec, validate_group

__all__ = [
    "ProblemParams",
    "metric_factors",
    "mean_curvature",
    "boundary_curvature",
    "unit_sphere_measure",
    "sphere_eigen",
    "angular_mean",
    "RadialGrid",
    "make_sphere_grid",
    "make_exterior_grid",
    "stiffness_matrix",
    "k_norm",
    "volume_check",
    "SymmetryGroup",
    "dihedral_group",
    "group_from_spec",
    "validate_group",
]
