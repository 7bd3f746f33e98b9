"""Rescaling S^d(k) to the unit sphere: epsilon = lambda k^2, ball radius k."""

import logging
from typing import Any, Dict, Optional

import numpy as np

from odp.annulus2d.dtn_map import evaluate_dtn
from odp.annulus2d.field import PerturbationField, make_annulus_grid
from odp.core.errors import ConfigurationError
from odp.geometry.grid import make_sphere_grid
from odp.geometry.metric import boundary_curvature
from odp.geometry.params import ProblemParams
from odp.radial.solver import ProfileCache, solve_radial, strong_residual

logger = logging.getLogger(__name__)


def unit_sphere_parameters(lam: float, k: float) -> Dict[str, float]:
    """epsilon and the geodesic radius of the excised ball after the scale change."""
    return {"epsilon": lam * k ** 2, "ball_radius": k, "sphere_radius": 1.0}


def _rescaled_profile(d: int, p: float, k: float, lam: float, n_r: int):
    """Solve at (k, lam) and map the nodes r -> k r onto the unit sphere."""
    params = ProblemParams.create(d, p, k, lam)
    original = ProfileCache(params, grid=make_sphere_grid(k, d, n=n_r)).get(lam)
    eps = lam * k ** 2
    unit = ProblemParams.create(d, p, 1.0, eps)
    grid = make_sphere_grid(1.0, d, n=original.grid.n, r_inner=k)
    mapped_residual = strong_residual(grid, unit, original.values)
    resolved = solve_radial(unit, grid, original.values)
    return original, resolved, mapped_residual


def rescale_to_unit_sphere(report: Dict[str, Any], n_r: Optional[int] = None) -> Dict[str, Any]:
    """
    Transfer a certificate or a branch point to S^d and re-solve there once.

    Args:
        report: Certificate fields (k, d, p, lambda_star) or a branch meta block
            with one point (k, p, n, lambda, coefficients)
        n_r: Radial cells (taken from the report when omitted)

    Returns:
        Dict with epsilon, ball_radius, the boundary description and the
        re-solve residuals
    """
    k = float(report["k"])
    d = int(report.get("d", 2))
    p = float(report["p"])
    n_r = int(n_r or report.get("n_r") or 2000)

    if "coefficients" in report:
        return _rescale_branch_point(report, k, d, p, n_r)
    if "lambda_star" not in report:
        raise ConfigurationError("Rescale input needs lambda_star (certificate) or a branch point")

    lam = float(report["lambda_star"])
    original, resolved, mapped = _rescaled_profile(d, p, k, lam, n_r)
    out = unit_sphere_parameters(lam, k)
    out.update(
        kind="certificate",
        lambda_value=lam,
        boundary=f"geodesic sphere of radius {k:g} about the south pole of S^{d}",
        boundary_curvature=boundary_curvature(1.0, d, k),
        mapped_residual=mapped,
        resolve_residual=resolved.residual_norm,
        max_profile_change=float(np.max(np.abs(resolved.values - original.values))),
        du_at_boundary=resolved.du_at_1,
        du_at_boundary_expected=original.du_at_1 / k,
    )
    logger.info(f"Rescaled lambda={lam:.10g}, k={k:g} to epsilon={out['epsilon']:.6g}: residual {mapped:.2e}")
    return out


def _rescale_branch_point(report: Dict[str, Any], k: float, d: int, p: float, n_r: int) -> Dict[str, Any]:
    if d != 2:
        raise ConfigurationError("Branch points exist for d=2 only")
    lam = float(report["lambda"])
    n = int(report["n"])
    n_theta = int(report.get("n_theta") or 256)
    v = PerturbationField(tuple(report["coefficients"]), n)

    original, resolved, mapped = _rescaled_profile(d, p, k, lam, n_r)
    grid = make_annulus_grid(1.0, n, n_r, n_theta, r_inner=k, radial=resolved.grid)
    data = evaluate_dtn(v, resolved.lam, resolved, grid)
    F_unit = float(np.max(np.abs(data.F)))
    out = unit_sphere_parameters(lam, k)
    out.update(
        kind="branch",
        lambda_value=lam,
        boundary=f"geodesic curve rho(theta) = {k:g} (1 + v(theta)) on S^2",
        coefficients=list(v.fourier),
        mapped_residual=mapped,
        F_residual=F_unit,
        F_residual_original_scale=k * F_unit,
        neumann_stddev=data.constancy,
    )
    logger.info(f"Rescaled branch point lambda={lam:.10g}: |F| on S^2 = {F_unit:.2e}")
    return out
