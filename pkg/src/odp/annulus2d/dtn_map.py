"""Nonlinear Dirichlet-to-Neumann map F_k(v, lambda) and its linearization check."""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from odp.annulus2d.field import AnnulusGrid, PerturbationField
from odp.annulus2d.solver import AnnulusSolution, solve_perturbed
from odp.core.errors import ConfigurationError
from odp.dtn.modes import mode_entry
from odp.radial.solver import RadialProfile

logger = logging.getLogger(__name__)


@dataclass
class NeumannData:
    """Normal derivative of u on the perturbed sphere, sampled on the wedge."""

    grid: AnnulusGrid
    normal_derivative: np.ndarray
    ds: np.ndarray
    solution: AnnulusSolution = field(repr=False)

    @property
    def mean(self) -> float:
        """Average over the boundary of B_{1+v} in its own surface measure."""
        return self.grid.wedge_mean(self.normal_derivative, self.ds)

    @property
    def F(self) -> np.ndarray:
        return self.normal_derivative - self.mean

    @property
    def stddev(self) -> float:
        return math.sqrt(self.grid.wedge_mean((self.normal_derivative - self.mean) ** 2, self.ds))

    @property
    def constancy(self) -> float:
        """stddev / |mean| of the normal derivative."""
        return self.stddev / abs(self.mean)


def neumann_data(solution: AnnulusSolution) -> NeumannData:
    op = solution.operator
    return NeumannData(
        grid=op.grid,
        normal_derivative=solution.boundary_flux / op.boundary_ds,
        ds=op.boundary_ds,
        solution=solution,
    )


def evaluate_dtn(
    v: PerturbationField,
    lam: float,
    u0: RadialProfile,
    grid: AnnulusGrid,
    guess: Optional[np.ndarray] = None,
    settings: Optional[Dict[str, Any]] = None,
) -> NeumannData:
    """Solve the pulled-back problem for v and collect its boundary data."""
    if v.n != grid.n:
        raise ConfigurationError(f"Perturbation has dihedral order {v.n}, grid has {grid.n}")
    return neumann_data(solve_perturbed(v, lam, u0, grid, guess=guess, settings=settings))


def nonlinear_dtn_F(
    v: PerturbationField,
    lam: float,
    u0: RadialProfile,
    grid: AnnulusGrid,
    guess: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    F_k(v, lambda) on the wedge nodes.

    The normal is the unit g_v-normal of {r = r_inner} pointing into the ball,
    so D_v F(0, lambda) = u'(1) H_{k,lambda}.
    """
    return evaluate_dtn(v, lam, u0, grid, guess=guess).F


def jacobian_check(
    u0: RadialProfile,
    grid: AnnulusGrid,
    j: int,
    eps_list: Sequence[float],
) -> pd.DataFrame:
    """
    Central differences of F along cos(j n theta) against u'(1) h_{jn} cos(j n theta).

    Args:
        u0: Radial profile at the lambda of interest, on grid.radial
        grid: Wedge grid
        j: Harmonic index, the mode degree is j n
        eps_list: Decreasing step sizes

    Returns:
        DataFrame with eps, fd_norm, expected_norm, abs_error, rel_error,
        increment (change of the difference quotient from the previous eps),
        observed_order (from successive increments) and extrapolated_rel_error
        (Richardson extrapolation of the last two quotients)
    """
    eps = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigurationError(f"eps_list must be strictly decreasing, got {eps}")
    degree = j * grid.n
    h = mode_entry(u0, degree).h
    expected = u0.du_at_1 * h * np.cos(degree * grid.theta)
    scale = float(np.max(np.abs(expected))) or abs(u0.du_at_1)

    quotients = []
    for e in eps:
        plus = nonlinear_dtn_F(PerturbationField.single_mode(grid.n, j, e), u0.lam, u0, grid)
        minus = nonlinear_dtn_F(PerturbationField.single_mode(grid.n, j, -e), u0.lam, u0, grid)
        quotients.append((plus - minus) / (2.0 * e))

    rows = []
    increments = [math.nan]
    for i, (e, q) in enumerate(zip(eps, quotients)):
        err = float(np.max(np.abs(q - expected)))
        if i:
            increments.append(float(np.max(np.abs(q - quotients[i - 1]))))
        order = math.nan
        if i >= 2 and increments[i] > 0 and increments[i - 1] > 0:
            order = math.log(increments[i - 1] / increments[i]) / math.log(eps[i - 1] / eps[i])
        rows.append(
            {
                "eps": e,
                "fd_norm": float(np.max(np.abs(q))),
                "expected_norm": float(np.max(np.abs(expected))),
                "abs_error": err,
                "rel_error": err / scale,
                "increment": increments[i],
                "observed_order": order,
            }
        )
    table = pd.DataFrame(rows)
    if len(eps) >= 2:
        ratio = (eps[-2] / eps[-1]) ** 2
        extrapolated = (ratio * quotients[-1] - quotients[-2]) / (ratio - 1.0)
        table.attrs["extrapolated_rel_error"] = float(np.max(np.abs(extrapolated - expected))) / scale
    table.attrs["h"] = h
    table.attrs["du_at_1"] = u0.du_at_1
    table.attrs["degree"] = degree
    logger.info(
        f"Linearization check mode {degree} at lambda={u0.lam:.8g}: h={h:.6g}, "
        f"rel error {table['rel_error'].iloc[-1]:.3e}"
    )
    return table
