"""Positive radial solution of the Dirichlet problem on S^d(k) minus B_1."""

import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from odp.core.config import solver_section
from odp.core.errors import ConfigurationError, SolverError
from odp.core.store import LambdaStore
from odp.exterior.profile import (
    ExteriorProfile,
    boundary_derivative,
    check_positive,
    nonlinear_residual,
    solve_exterior_radial,
    solve_nonlinear_radial,
)
from odp.geometry.grid import RadialGrid, dirichlet_energy, make_sphere_grid, mass_integral
from odp.geometry.params import ProblemParams
from odp.numerics.radial_operator import base_matrix
from odp.radial.cutoff import cutoff_guess

logger = logging.getLogger(__name__)


@dataclass
class RadialProfile:
    """Samples of u_{k,lambda} on [r_inner, pi/k] with the solve diagnostics."""

    grid: RadialGrid
    values: np.ndarray
    params: ProblemParams
    residual_norm: float
    du_at_1: float

    @property
    def lam(self) -> float:
        return self.params.lam

    @property
    def k(self) -> float:
        return self.params.k

    def at(self, r: np.ndarray) -> np.ndarray:
        return np.interp(r, self.grid.nodes, self.values, left=0.0, right=0.0)

    def derivative(self) -> np.ndarray:
        """Nodal derivative, with the flux-consistent value at the inner boundary."""
        du = np.gradient(self.values, self.grid.h, edge_order=2)
        du[0] = self.du_at_1
        return du

    def pole_derivative(self) -> float:
        """One-sided second-order u'(pi/k)."""
        u, h = self.values, self.grid.h
        return float((3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"r": self.grid.nodes, "u": self.values, "du": self.derivative()})


def strong_residual(grid: RadialGrid, params: ProblemParams, values: np.ndarray) -> float:
    """Sup-norm of the strong-form residual on the free nodes."""
    A = base_matrix(grid, params.lam)
    r = nonlinear_residual(A, grid.cell_volumes, values, params.p)
    return float(np.max(np.abs(r[1:] / grid.cell_volumes[1:])))


def default_sphere_grid(params: ProblemParams, n: Optional[int] = None) -> RadialGrid:
    cfg = solver_section("grid")
    n = n or int(cfg.get("n_sphere", 2000))
    return make_sphere_grid(params.k, params.d, n=n, n_gauss=int(cfg.get("gauss_points", 8)))


def solve_radial(
    params: ProblemParams,
    grid: RadialGrid,
    guess: np.ndarray,
    settings: Optional[Dict[str, Any]] = None,
) -> RadialProfile:
    """
    Solve -lam[u'' + (d-1) C_k/S_k u'] + u - (u^+)^p = 0, u(1) = 0, u'(pi/k) = 0.

    A guess whose residual already meets the acceptance tolerance is
    returned unchanged.

    Args:
        params: Problem parameters
        grid: Sphere grid
        guess: Nonnegative initial iterate on the grid nodes
        settings: Newton overrides

    Returns:
        RadialProfile

    Raises:
        ConvergenceError: Newton diverged after damping
        TrivialSolutionError: Newton reached u = 0
    """
    if grid.kind != "sphere" or grid.k != params.k or grid.d != params.d:
        raise ConfigurationError(f"Grid ({grid.kind}, k={grid.k}, d={grid.d}) does not match {params.to_dict()}")
    guess = np.asarray(guess, dtype=float)
    if len(guess) != grid.n + 1:
        raise ConfigurationError(f"Guess has {len(guess)} samples, grid has {grid.n + 1} nodes")
    if np.min(guess) < -1e-10 * max(1.0, float(np.max(guess))):
        raise ConfigurationError("Initial guess must be nonnegative")
    guess = np.maximum(guess, 0.0)
    guess[0] = 0.0

    accept_tol = float(solver_section("newton").get("accept_tol", 1e-10))
    if settings and "accept_tol" in settings:
        accept_tol = float(settings["accept_tol"])
    res0 = strong_residual(grid, params, guess)
    if res0 < accept_tol:
        logger.debug(f"Guess already solves k={params.k:g}, lambda={params.lam:g} (residual {res0:.2e})")
        values, res, iters = guess, res0, 0
    else:
        values, res, iters = solve_nonlinear_radial(grid, params, guess, settings, "sphere")

    trivial_tol = float(solver_section("newton").get("trivial_tol", 1e-6))
    check_positive(values, trivial_tol, f"sphere k={params.k:g}")
    du = boundary_derivative(grid, params, values)
    logger.debug(f"Sphere k={params.k:g}, lambda={params.lam:g}: residual {res:.2e} in {iters} iterations")
    return RadialProfile(grid, values, params, res, du)


def solve_from_limit(
    params: ProblemParams,
    grid: Optional[RadialGrid] = None,
    ext: Optional[ExteriorProfile] = None,
    settings: Optional[Dict[str, Any]] = None,
) -> RadialProfile:
    """Solve on the sphere starting from the cut-off limit profile."""
    grid = grid or default_sphere_grid(params)
    ext = ext or solve_exterior_radial(params)
    return solve_radial(params, grid, cutoff_guess(ext, grid), settings)


def energy_identity(profile: RadialProfile) -> float:
    """Relative residual of int(lam u'^2 + u^2) S^{d-1} = int u^{p+1} S^{d-1}."""
    grid, u, lam, p = profile.grid, profile.values, profile.lam, profile.params.p
    lhs = lam * dirichlet_energy(grid, u) + mass_integral(grid, u ** 2)
    rhs = mass_integral(grid, np.maximum(u, 0.0) ** (p + 1.0))
    return abs(lhs - rhs) / abs(rhs)


def continuation_settings() -> Dict[str, Any]:
    cfg: Dict[str, Any] = {"seed_lambda": 1.0, "max_ratio": 1.25, "max_halvings": 8}
    cfg.update(solver_section("continuation"))
    return cfg


def continue_in_lambda(
    start: RadialProfile,
    lam: float,
    settings: Optional[Dict[str, Any]] = None,
) -> RadialProfile:
    """
    March a sphere profile from start.lam to lam on the same grid.

    Steps are geometric with ratio at most max_ratio; a failed step is halved
    up to max_halvings times in a row.

    Raises:
        SolverError: when the step falls below the halving limit
    """
    lam = float(lam)
    cfg = continuation_settings()
    if settings:
        cfg.update(settings)
    max_step = math.log(float(cfg["max_ratio"]))
    step = max_step
    halvings = 0
    current = start
    while current.lam != lam:
        remaining = math.log(lam / current.lam)
        trial = lam if abs(remaining) <= step else current.lam * math.exp(math.copysign(step, remaining))
        try:
            current = solve_radial(
                start.params.with_lambda(trial), start.grid, np.maximum(current.values, 0.0)
            )
        except SolverError as e:
            halvings += 1
            if halvings > int(cfg["max_halvings"]):
                raise SolverError(
                    f"Continuation in lambda stalled at {current.lam:g} on the way to {lam:g}: {e}"
                ) from e
            step /= 2.0
            continue
        halvings = 0
        step = min(2.0 * step, max_step)
    return current


class ProfileCache:
    """
    Sphere profiles along lambda at fixed k on a fixed grid.

    New lambdas start from the stored profile with the nearest lambda, then
    from the cut-off limit profile, then by continuation in lambda from the
    seed lambda. The store keeps the cache_size most recently used profiles.
    """

    def __init__(
        self,
        params_base: ProblemParams,
        grid: Optional[RadialGrid] = None,
        n: Optional[int] = None,
        cache_size: Optional[int] = None,
    ):
        self.params_base = params_base
        self.grid = grid or default_sphere_grid(params_base, n)
        size = cache_size or int(solver_section("grid").get("cache_size", 64))
        self._profiles: LambdaStore[RadialProfile] = LambdaStore(size)

    def __len__(self) -> int:
        return len(self._profiles)

    def __contains__(self, lam: float) -> bool:
        return lam in self._profiles

    def add(self, profile: RadialProfile) -> None:
        """Register an already solved profile on the cache grid."""
        if profile.grid.n != self.grid.n or profile.k != self.params_base.k:
            raise ConfigurationError("Profile does not belong to this cache")
        self._profiles.put(profile.lam, profile)

    def get(self, lam: float) -> RadialProfile:
        lam = float(lam)
        cached = self._profiles.get(lam)
        if cached is not None:
            return cached
        params = self.params_base.with_lambda(lam)
        profile = None
        nearest = self._profiles.nearest(lam)
        if nearest is not None:
            try:
                profile = solve_radial(params, self.grid, np.maximum(self._profiles.get(nearest).values, 0.0))
            except SolverError as e:
                logger.warning(f"Continuation from lambda={nearest:g} to {lam:g} failed: {e}")
        if profile is None:
            try:
                profile = solve_from_limit(params, self.grid)
            except SolverError as e:
                profile = self._march(lam, nearest, e)
        self._profiles.put(lam, profile)
        return profile

    def _march(self, lam: float, nearest: Optional[float], error: SolverError) -> RadialProfile:
        seed = float(continuation_settings()["seed_lambda"])
        if nearest is None and lam == seed:
            raise error
        logger.warning(f"Cut-off start failed at lambda={lam:g} ({error}), continuing in lambda")
        start = self._profiles.get(nearest) if nearest is not None else self.get(seed)
        return continue_in_lambda(start, lam)
