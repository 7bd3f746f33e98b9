"""Shared numerical kernels: damped Newton and symmetric eigen solvers."""

from odp.numerics.newton import NewtonResult, damped_newton
from odp.numerics.eigen import smallest_eigenpairs, dense_smallest_eigenpairs

__all__ = ["NewtonResult", "damped_newton", "smallest_eigenpairs", "dense_smallest_eigenpairs"]
