"""Damped Newton iteration for sparse nonlinear systems."""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import spsolve

from odp.core.config import solver_section
from odp.core.errors import ConvergenceError

logger = logging.getLogger(__name__)


@dataclass
class NewtonResult:
    """Outcome of a Newton solve."""

    x: np.ndarray
    residual_norm: float
    iterations: int
    history: list


def _settings(overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    cfg = {
        "max_iter": 60,
        "max_halvings": 12,
        "residual_tol": 1e-12,
        "step_tol": 1e-14,
        "accept_tol": 1e-10,
    }
    cfg.update(solver_section("newton"))
    if overrides:
        cfg.update(overrides)
    return cfg


def damped_newton(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], sps.spmatrix],
    x0: np.ndarray,
    scale: Optional[np.ndarray] = None,
    settings: Optional[Dict[str, Any]] = None,
    label: str = "newton",
) -> NewtonResult:
    """
    Solve residual(x) = 0 by Newton's method with step halving.

    The convergence test uses the sup-norm of residual(x) / scale, i.e. the
    strong-form residual when scale holds the finite-volume masses.

    Args:
        residual: Residual function
        jacobian: Sparse Jacobian function
        x0: Initial iterate
        scale: Positive row scaling for the convergence norm
        settings: Overrides for the newton section of solver.yaml
        label: Name used in log messages

    Returns:
        NewtonResult with the accepted iterate

    Raises:
        ConvergenceError: if the final residual exceeds accept_tol
    """
    cfg = _settings(settings)
    x = np.array(x0, dtype=float)
    w = np.ones_like(x) if scale is None else np.asarray(scale, dtype=float)

    def norm(r: np.ndarray) -> float:
        return float(np.max(np.abs(r / w))) if r.size else 0.0

    r = residual(x)
    res = norm(r)
    history = [res]
    iterations = 0

    while res >= cfg["residual_tol"] and iterations < cfg["max_iter"]:
        iterations += 1
        step = spsolve(sps.csc_matrix(jacobian(x)), -r)
        if not np.all(np.isfinite(step)):
            raise ConvergenceError(f"{label}: singular Jacobian at iteration {iterations}", res, iterations)

        t = 1.0
        for _ in range(cfg["max_halvings"] + 1):
            x_try = x + t * step
            r_try = residual(x_try)
            res_try = norm(r_try)
            if np.isfinite(res_try) and res_try < res:
                break
            t *= 0.5
        else:
            t *= 2.0
            logger.debug(f"{label}: no decrease after {cfg['max_halvings']} halvings, taking t={t:g}")

        if not np.isfinite(res_try):
            raise ConvergenceError(f"{label}: residual overflow at iteration {iterations}", res, iterations)

        x, r, res = x_try, r_try, res_try
        history.append(res)
        logger.debug(f"{label}: iter {iterations} residual {res:.3e} damping {t:g}")
        if t * np.max(np.abs(step)) < cfg["step_tol"]:
            break

    if res > cfg["accept_tol"]:
        raise ConvergenceError(
            f"{label}: residual {res:.3e} after {iterations} iterations exceeds {cfg['accept_tol']:g}",
            res,
            iterations,
        )
    return NewtonResult(x=x, residual_norm=res, iterations=iterations, history=history)
