"""Positive radial solution of the limit problem on R^d minus B_1."""

import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import scipy.sparse as sps

from odp.core.config import solver_section
from odp.core.errors import ConfigurationError, SolverError, TrivialSolutionError
from odp.geometry.grid import RadialGrid, make_exterior_grid, dirichlet_energy, mass_integral
from odp.geometry.params import ProblemParams
from odp.numerics.newton import damped_newton
from odp.numerics.radial_operator import base_matrix, robin_coefficient

logger = logging.getLogger(__name__)

MIN_RMAX_FACTOR = 30.0


@dataclass
class ExteriorProfile:
    """Samples of u~_lambda on [1, R_max] with the decay closure at R_max."""

    grid: RadialGrid
    values: np.ndarray
    params: ProblemParams
    residual_norm: float
    du_at_1: float

    @property
    def lam(self) -> float:
        return self.params.lam

    @property
    def robin_coeff(self) -> float:
        return 1.0 / math.sqrt(self.params.lam)

    @property
    def r_max(self) -> float:
        return self.grid.r_end

    def at(self, r: np.ndarray) -> np.ndarray:
        """Linear interpolation, extended by 0 beyond R_max."""
        return np.interp(r, self.grid.nodes, self.values, left=0.0, right=0.0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "r": self.grid.nodes,
                "u": self.values,
                "du": np.gradient(self.values, self.grid.h, edge_order=2),
            }
        )


def default_r_max(lam: float) -> float:
    factor = float(solver_section("grid").get("r_max_factor", 40.0))
    return 1.0 + factor * math.sqrt(lam)


def bump_guess(grid: RadialGrid, params: ProblemParams, amplitude: float = 1.0) -> np.ndarray:
    """c s e^{-s} with s = (r-1)/sqrt(lambda), peak scaled by the 1D ground state height."""
    s = (grid.nodes - grid.r_inner) / math.sqrt(params.lam)
    peak = 1.5 * ((params.p + 1.0) / 2.0) ** (1.0 / (params.p - 1.0))
    return amplitude * peak * math.e * s * np.exp(-s)


def rescaled_guess(profile: ExteriorProfile, grid: RadialGrid, lam: float) -> np.ndarray:
    """Transplant a profile to another lambda in the variable (r-1)/sqrt(lambda)."""
    s = (grid.nodes - grid.r_inner) / math.sqrt(lam)
    r_old = profile.grid.r_inner + s * math.sqrt(profile.lam)
    return profile.at(r_old)


def nonlinear_residual(A: sps.csr_matrix, volumes: np.ndarray, u: np.ndarray, p: float) -> np.ndarray:
    """Finite-volume residual lam K u + V (u - (u^+)^p) on all nodes."""
    return A.dot(u) + volumes * (u - np.maximum(u, 0.0) ** p)


def solve_nonlinear_radial(
    grid: RadialGrid,
    params: ProblemParams,
    guess: np.ndarray,
    settings: Optional[Dict[str, Any]] = None,
    label: str = "radial",
):
    """
    Newton solve of -lam Delta u + u - (u^+)^p = 0 with u(r_inner) = 0.

    Shared by the exterior and sphere problems; the grid decides the weight
    and the closure at the far end.

    Returns:
        (values on all nodes, strong residual norm, iterations)
    """
    A = base_matrix(grid, params.lam)
    volumes = grid.cell_volumes
    free = slice(1, grid.n + 1)
    A_ff = A[free][:, free].tocsr()
    p = params.p

    def full(x: np.ndarray) -> np.ndarray:
        return np.concatenate(([0.0], x))

    def residual(x: np.ndarray) -> np.ndarray:
        return nonlinear_residual(A, volumes, full(x), p)[free]

    def jacobian(x: np.ndarray) -> sps.csr_matrix:
        return A_ff + sps.diags(volumes[free] * (1.0 - p * np.maximum(x, 0.0) ** (p - 1.0)))

    result = damped_newton(residual, jacobian, np.asarray(guess, dtype=float)[free], volumes[free], settings, label)
    return full(result.x), result.residual_norm, result.iterations


def boundary_derivative(grid: RadialGrid, params: ProblemParams, u: np.ndarray) -> float:
    """u'(r_inner) from the row-0 balance of the conservative stencil."""
    A = base_matrix(grid, params.lam)
    row0 = nonlinear_residual(A, grid.cell_volumes, u, params.p)[0]
    return -row0 / (params.lam * grid.boundary_measure)


def check_positive(values: np.ndarray, trivial_tol: float, label: str) -> None:
    """Reject the zero solution and sign-changing profiles."""
    peak = float(np.max(values))
    if peak < trivial_tol:
        raise TrivialSolutionError(f"{label}: Newton converged to the trivial solution (max u = {peak:.2e})")
    if float(np.min(values[1:])) < -1e-10 * peak:
        raise SolverError(f"{label}: solution changes sign (min u = {float(np.min(values[1:])):.2e})")


def solve_exterior_radial(
    params: ProblemParams,
    r_max: Optional[float] = None,
    n: Optional[int] = None,
    guess: Optional[np.ndarray] = None,
    settings: Optional[Dict[str, Any]] = None,
) -> ExteriorProfile:
    """
    Positive radial solution of -lam(u'' + (d-1)/r u') + u - u^p = 0, u(1) = 0.

    Args:
        params: Problem parameters (k is ignored)
        r_max: Truncation radius (default 1 + 40 sqrt(lam))
        n: Number of cells (default grid.n_exterior)
        guess: Initial iterate on the grid nodes (default: bump with amplitude retries)
        settings: Newton overrides

    Returns:
        ExteriorProfile
    """
    lam = params.lam
    if r_max is None:
        r_max = default_r_max(lam)
    if r_max < 1.0 + MIN_RMAX_FACTOR * math.sqrt(lam):
        raise ConfigurationError(f"R_max={r_max:g} below 1 + {MIN_RMAX_FACTOR:g} sqrt(lambda)")
    if n is None:
        n = int(solver_section("grid").get("n_exterior", 4000))
    grid = make_exterior_grid(params.d, r_max, n)
    trivial_tol = float(solver_section("newton").get("trivial_tol", 1e-6))

    if guess is not None:
        candidates = [np.asarray(guess, dtype=float)]
    else:
        amplitudes = solver_section("exterior").get("amplitudes", [1.0, 1.6, 2.5, 0.6])
        candidates = [bump_guess(grid, params, a) for a in amplitudes]

    last_error: Optional[Exception] = None
    for attempt, start in enumerate(candidates):
        try:
            values, res, iters = solve_nonlinear_radial(grid, params, start, settings, "exterior")
            check_positive(values, trivial_tol, "exterior")
        except SolverError as e:
            logger.warning(f"Exterior solve at lambda={lam:g} attempt {attempt + 1} failed: {e}")
            last_error = e
            continue
        if values[-1] > 1e-8:
            logger.warning(f"Exterior profile not decayed at R_max={r_max:g}: u={values[-1]:.2e}")
        logger.debug(f"Exterior lambda={lam:g}: residual {res:.2e} in {iters} iterations")
        return ExteriorProfile(grid, values, params, res, boundary_derivative(grid, params, values))

    assert last_error is not None
    raise last_error


def energy_identity(profile: ExteriorProfile) -> float:
    """Relative residual of int(lam u'^2 + u^2) r^{d-1} = int u^{p+1} r^{d-1}."""
    grid, u, lam, p = profile.grid, profile.values, profile.lam, profile.params.p
    lhs = lam * dirichlet_energy(grid, u) + mass_integral(grid, u ** 2) + robin_coefficient(grid, lam) * u[-1] ** 2
    rhs = mass_integral(grid, np.maximum(u, 0.0) ** (p + 1.0))
    return abs(lhs - rhs) / abs(rhs)


def decay_rate(profile: ExteriorProfile, upper: float = 1e-4, lower: float = 1e-12) -> float:
    """Slope of log u~ fitted on the tail where lower < u/max u < upper."""
    u = profile.values
    r = profile.grid.nodes
    peak = float(np.max(u))
    i_peak = int(np.argmax(u))
    mask = (np.arange(len(u)) > i_peak) & (u > lower * peak) & (u < upper * peak)
    if np.count_nonzero(mask) < 10:
        raise SolverError("Not enough tail samples to fit the decay rate")
    slope, _ = np.polyfit(r[mask], np.log(u[mask]), 1)
    return float(slope)
