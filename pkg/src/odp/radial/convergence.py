"""k -> 0 convergence of the sphere profiles and the uniform bounds along it."""

import logging
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from odp.core.config import solver_section
from odp.core.errors import ConfigurationError, SolverError
from odp.core.validation import ensure_decreasing
from odp.exterior.profile import ExteriorProfile, solve_exterior_radial
from odp.geometry.grid import k_norm, make_sphere_grid
from odp.geometry.params import ProblemParams
from odp.radial.cutoff import cutoff_guess
from odp.radial.solver import RadialProfile, solve_radial

logger = logging.getLogger(__name__)


def limit_on_grid(ext: ExteriorProfile, r: np.ndarray) -> np.ndarray:
    """Cubic interpolant of u~ on r, extended by 0 past R_max."""
    spline = CubicSpline(ext.grid.nodes, ext.values)
    out = np.where(r <= ext.r_max, spline(np.minimum(r, ext.r_max)), 0.0)
    return out


def limit_distance(profile: RadialProfile, ext: ExteriorProfile) -> float:
    """||u_{k,lambda} - u~_lambda||_k on the sphere grid."""
    diff = profile.values - limit_on_grid(ext, profile.grid.nodes)
    return k_norm(diff, profile.grid, profile.grid.d)


def convergence_study(
    params_base: ProblemParams,
    k_list: Sequence[float],
    spacing: Optional[float] = None,
    n_exterior: Optional[int] = None,
    tol: float = 1e-12,
) -> pd.DataFrame:
    """
    e(k) = ||u_{k,lambda} - u~_lambda||_k along a decreasing k_list.

    Every sphere grid shares the spacing of the limit grid. The march reuses
    the previous sphere profile as the guess and falls back to the cut-off
    limit profile.

    Args:
        params_base: d, p and lambda
        k_list: Strictly decreasing curvatures
        spacing: Radial spacing (default: limit grid spacing)
        n_exterior: Limit grid cells
        tol: Slack allowed before e(k) counts as non-decreasing

    Returns:
        DataFrame with columns k, n, error, u_max, du_at_1, residual, failure, decreasing.
        A k whose solve fails keeps its row with NaN values and the failure message.
    """
    ensure_decreasing(k_list, "k_list")
    ext = solve_exterior_radial(params_base, n=n_exterior)
    h = spacing or ext.grid.h

    rows = []
    previous: Optional[RadialProfile] = None
    for k in k_list:
        params = params_base.with_k(k)
        grid = make_sphere_grid(k, params.d, spacing=h)
        profile = None
        if previous is not None:
            try:
                profile = solve_radial(params, grid, np.maximum(previous.at(grid.nodes), 0.0))
            except SolverError as e:
                logger.warning(f"Continuation to k={k:g} failed, restarting from the limit: {e}")
        if profile is None:
            try:
                profile = solve_radial(params, grid, cutoff_guess(ext, grid))
            except SolverError as e:
                logger.warning(f"No sphere profile at k={k:g}: {e}")
                rows.append({"k": k, "n": grid.n, "failure": f"{type(e).__name__}: {e}"})
                continue
        rows.append(
            {
                "k": k,
                "n": grid.n,
                "error": limit_distance(profile, ext),
                "u_max": float(np.max(profile.values)),
                "du_at_1": profile.du_at_1,
                "residual": profile.residual_norm,
                "failure": None,
            }
        )
        previous = profile

    table = pd.DataFrame(rows, columns=["k", "n", "error", "u_max", "du_at_1", "residual", "failure"])
    errors = table["error"].to_numpy(dtype=float)
    decreasing = np.isfinite(errors)
    solved = np.nonzero(decreasing)[0]
    decreasing[solved[1:]] = np.diff(errors[solved]) < tol
    table["decreasing"] = decreasing
    if not decreasing.all():
        bad = table.loc[~table["decreasing"], "k"].tolist()
        logger.warning(f"e(k) not decreasing at k={bad}: solver or grid inconsistency")
    return table


def far_field_radius(profile: RadialProfile, delta: float) -> float:
    """Smallest node radius beyond which u < delta."""
    above = np.nonzero(profile.values >= delta)[0]
    if above.size == 0:
        return profile.grid.r_inner
    return float(profile.grid.nodes[min(above[-1] + 1, profile.grid.n)])


def profile_bounds(profiles: Iterable[RadialProfile], delta: float = 1e-3) -> pd.DataFrame:
    """Sup norm and far-field radius R(delta) per profile."""
    rows = [
        {
            "k": prof.k,
            "lambda": prof.lam,
            "u_max": float(np.max(prof.values)),
            "r_at_max": float(prof.grid.nodes[int(np.argmax(prof.values))]),
            "r_delta": far_field_radius(prof, delta),
        }
        for prof in profiles
    ]
    return pd.DataFrame(rows, columns=["k", "lambda", "u_max", "r_at_max", "r_delta"])


def largest_converging_k(params_base: ProblemParams, k_list: Sequence[float], n: Optional[int] = None) -> Optional[float]:
    """
    Largest k whose Newton solve from the cut-off guess converges.

    Returns:
        The k, or None if none converges
    """
    ext = solve_exterior_radial(params_base)
    n = n or int(solver_section("grid").get("n_sphere", 2000))
    for k in sorted(k_list, reverse=True):
        try:
            params = params_base.with_k(k)
            grid = make_sphere_grid(k, params.d, n=n)
            solve_radial(params, grid, cutoff_guess(ext, grid))
        except SolverError as e:
            logger.info(f"No convergence at k={k:g}: {e}")
            continue
        except ConfigurationError as e:
            logger.info(f"k={k:g} rejected: {e}")
            continue
        return float(k)
    return None
