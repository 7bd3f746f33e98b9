"""Radial Dirichlet problem on S^d(k) minus B_1 and its k -> 0 behaviour."""

from odp.radial.cutoff import cutoff_guess, cutoff_function, max_cutoff_slope
from odp.radial.solver import RadialProfile, ProfileCache, solve_radial, solve_from_limit, energy_identity
from odp.radial.convergence import convergence_study, profile_bounds, largest_converging_k

__all__ = [
    "cutoff_guess",
    "cutoff_function",
    "max_cutoff_slope",
    "RadialProfile",
    "ProfileCache",
    "solve_radial",
    "solve_from_limit",
    "energy_identity",
    "convergence_study",
    "profile_bounds",
    "largest_converging_k",
]
