"""Nontrivial branch F(v, lambda) = 0 at fixed first-harmonic amplitude."""

import math
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import lu_factor, lu_solve

from odp.annulus2d.dtn_map import NeumannData, evaluate_dtn
from odp.annulus2d.field import AnnulusGrid, PerturbationField
from odp.core.config import solver_section
from odp.core.errors import BranchError, ConfigurationError, SolverError
from odp.radial.solver import ProfileCache

logger = logging.getLogger(__name__)


@dataclass
class BranchPoint:
    amplitude: float
    lam: float
    coefficients: List[float]
    F_residual: float
    neumann_constant: float
    neumann_stddev: float
    iterations: int = 0
    values: Optional[np.ndarray] = field(default=None, repr=False)

    def to_row(self) -> Dict[str, Any]:
        row = {"amplitude": self.amplitude, "lambda": self.lam}
        for j, a in enumerate(self.coefficients, start=1):
            row[f"a_{j}"] = a
        row.update(F_residual=self.F_residual, neumann_constant=self.neumann_constant, neumann_stddev=self.neumann_stddev)
        return row

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out.pop("values")
        return out


def _settings() -> Dict[str, Any]:
    cfg = {"branch_tol": 1e-9, "branch_max_iter": 12, "n_modes": 8, "fd_step": 1e-7, "fd_step_lambda": 1e-5}
    cfg.update(solver_section("annulus"))
    return cfg


class BranchSystem:
    """
    Galerkin residual c_j(F), j = 1..J, in the unknowns (a_2, ..., a_J, lambda).

    One evaluation costs a radial solve at lambda plus a solve on the annulus.
    """

    def __init__(self, cache: ProfileCache, grid: AnnulusGrid, amplitude: float, n_modes: int):
        self.cache = cache
        self.grid = grid
        self.amplitude = amplitude
        self.n_modes = n_modes
        self.guess: Optional[np.ndarray] = None

    def field(self, y: np.ndarray) -> PerturbationField:
        return PerturbationField((self.amplitude,) + tuple(y[:-1]), self.grid.n)

    def neumann(self, y: np.ndarray) -> NeumannData:
        lam = float(y[-1])
        data = evaluate_dtn(self.field(y), lam, self.cache.get(lam), self.grid, guess=self.guess)
        self.guess = data.solution.values
        return data

    def project(self, data: NeumannData) -> np.ndarray:
        F = data.F
        return np.array([self.grid.project(F, j) for j in range(1, self.n_modes + 1)])

    def residual(self, y: np.ndarray) -> np.ndarray:
        return self.project(self.neumann(y))

    def jacobian(self, y: np.ndarray, r0: np.ndarray, step: float, step_lambda: float) -> np.ndarray:
        """Forward differences, relative in lambda."""
        J = np.empty((self.n_modes, len(y)))
        base_guess = self.guess
        for i in range(len(y)):
            dy = step_lambda * y[-1] if i == len(y) - 1 else step
            y_try = y.copy()
            y_try[i] += dy
            J[:, i] = (self.residual(y_try) - r0) / dy
            self.guess = base_guess
        return J


def _chord_solve(system: BranchSystem, y0: np.ndarray, jac, cfg: Dict[str, Any]):
    """Chord iterations with a frozen LU; returns (y, data, iterations, lu) or raises SolverError."""
    y = y0.copy()
    data = system.neumann(y)
    r = system.project(data)
    lu = jac
    for it in range(1, int(cfg["branch_max_iter"]) + 1):
        if lu is None:
            lu = lu_factor(system.jacobian(y, r, cfg["fd_step"], cfg["fd_step_lambda"]))
        y_new = y - lu_solve(lu, r)
        data_new = system.neumann(y_new)
        r_new = system.project(data_new)
        if np.max(np.abs(r_new)) >= np.max(np.abs(r)):
            if jac is lu:
                logger.debug(f"Branch a={system.amplitude:g}: chord stalled at iteration {it}, refreshing Jacobian")
                lu = None
                jac = None
                continue
            raise SolverError(f"chord iteration stalled at |c|={np.max(np.abs(r)):.3e}")
        y, data, r = y_new, data_new, r_new
        logger.debug(f"Branch a={system.amplitude:g}: iter {it} |c|={np.max(np.abs(r)):.3e} lambda={y[-1]:.10g}")
        if np.max(np.abs(data.F)) < cfg["branch_tol"]:
            return y, data, it, lu
    raise SolverError(f"no convergence after {cfg['branch_max_iter']} iterations (|F|={np.max(np.abs(data.F)):.3e})")


def trace_branch(
    cache: ProfileCache,
    grid: AnnulusGrid,
    amplitudes: Sequence[float],
    lambda_star: float,
    n_modes: Optional[int] = None,
) -> pd.DataFrame:
    """
    Solve F(v, lambda) = 0 with a_1 = a for each amplitude, in order.

    The first point starts from (v = a cos(n theta), lambda*); later points
    start from the previous one.

    Args:
        cache: Radial profiles at the branch curvature on grid.radial
        grid: Wedge grid for the dihedral order n
        amplitudes: First-harmonic amplitudes, increasing
        lambda_star: Degeneracy parameter from the certificate
        n_modes: Harmonics J in v (annulus.n_modes when omitted)

    Returns:
        DataFrame with amplitude, lambda, a_1..a_J, F_residual,
        neumann_constant, neumann_stddev; attrs["rate"] holds the fitted
        exponent of |lambda(a) - lambda*| in a

    Raises:
        BranchError: carrying the last converged BranchPoint
    """
    cfg = _settings()
    J = int(cfg["n_modes"] if n_modes is None else n_modes)
    if J < 1:
        raise ConfigurationError(f"n_modes={J} must be >= 1")
    if cache.grid.n != grid.radial.n:
        raise ConfigurationError("Profile cache and annulus grid use different radial grids")
    amplitudes = [float(a) for a in amplitudes]
    if any(a <= 0.0 for a in amplitudes):
        raise ConfigurationError("Branch amplitudes must be positive")

    points: List[BranchPoint] = []
    y = np.zeros(J)
    y[-1] = lambda_star
    guess = None
    lu = None
    for a in amplitudes:
        system = BranchSystem(cache, grid, a, J)
        system.guess = guess
        try:
            y, data, iterations, lu = _chord_solve(system, y, lu, cfg)
        except (SolverError, ConfigurationError) as e:
            last = points[-1] if points else None
            raise BranchError(f"Branch continuation failed at amplitude {a:g}: {e}", last_point=last) from e
        guess = data.solution.values
        point = BranchPoint(
            amplitude=a,
            lam=float(y[-1]),
            coefficients=[a] + [float(c) for c in y[:-1]],
            F_residual=float(np.max(np.abs(data.F))),
            neumann_constant=data.mean,
            neumann_stddev=data.constancy,
            iterations=iterations,
            values=guess,
        )
        points.append(point)
        logger.info(f"Branch point a={a:g}: lambda={point.lam:.10g}, |F|={point.F_residual:.2e}, constancy {point.neumann_stddev:.2e}")

    table = pd.DataFrame([p.to_row() for p in points])
    table.attrs["lambda_star"] = lambda_star
    table.attrs["rate"] = branch_rate(table, lambda_star)
    return table


def branch_rate(table: pd.DataFrame, lambda_star: float) -> float:
    """Least-squares slope of log|lambda(a) - lambda*| against log a."""
    gap = np.abs(table["lambda"].to_numpy() - lambda_star)
    a = table["amplitude"].to_numpy()
    keep = gap > 0
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(a[keep]), np.log(gap[keep]), 1)[0])
