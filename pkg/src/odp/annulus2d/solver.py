"""Pulled-back semilinear problem on the fixed annulus, d = 2.

The discrete operator comes from the energy

    1/2 int (A_rr u_r^2 + 2 A_rt u_r u_t + A_tt u_t^2) dr dtheta

with u_r on radial cell faces, spectral u_t on the wedge nodes and the mass
a S_k(rho) integrated over the radial control volumes. At v = 0 a theta-constant
column reproduces the radial stencil exactly.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
import scipy.sparse as sps

from odp.core.config import solver_section
from odp.core.errors import SolverError
from odp.annulus2d.field import AnnulusGrid, PerturbationField
from odp.annulus2d.metric import MetricField, pullback_metric
from odp.geometry.grid import DEFAULT_GAUSS_POINTS
from odp.numerics.newton import damped_newton
from odp.radial.solver import RadialProfile

logger = logging.getLogger(__name__)


@dataclass
class PulledBackOperator:
    """Stiffness K, lumped mass and the boundary metric for one perturbation."""

    grid: AnnulusGrid
    v: PerturbationField
    stiffness: sps.csr_matrix
    mass: np.ndarray
    boundary_ds: np.ndarray
    metric: MetricField = field(repr=False)

    def symmetry_error(self) -> float:
        diff = self.stiffness - self.stiffness.T
        return float(abs(diff).max()) if diff.nnz else 0.0


def _control_volume_mass(grid: AnnulusGrid, v: PerturbationField, k: float, n_gauss: int = DEFAULT_GAUSS_POINTS) -> np.ndarray:
    """Integrals of a S_k(rho) over the radial control volumes, per wedge angle."""
    radial = grid.radial
    nodes, h = radial.nodes, radial.h
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    out = np.zeros(grid.shape)
    for lo, hi, rows in ((nodes[1:] - 0.5 * h, nodes[1:], slice(1, None)), (nodes[:-1], nodes[:-1] + 0.5 * h, slice(None, -1))):
        half = 0.5 * (hi - lo)
        pts = (0.5 * (hi + lo))[:, None] + half[:, None] * x[None, :]
        metric = pullback_metric(v, k, pts.ravel(), grid.theta, radial.r_inner)
        density = metric.volume_density.reshape(len(lo), n_gauss, grid.n_wedge)
        out[rows] += np.einsum("igj,g->ij", density, w) * half[:, None]
    return out


def assemble_operator(grid: AnnulusGrid, v: PerturbationField, k: float) -> PulledBackOperator:
    """
    Symmetric stiffness of -Delta_{g_v} in divergence form on the wedge grid.

    Returns:
        PulledBackOperator; unknowns are ordered radius-major, (i, j) -> i n_wedge + j
    """
    radial = grid.radial
    n_r, n_w = radial.n, grid.n_wedge
    h = radial.h
    w_t = grid.theta_weights

    edges = radial.nodes[:-1] + 0.5 * h
    A_rr, A_rt, _ = pullback_metric(v, k, edges, grid.theta, radial.r_inner).coefficients()
    nodal = pullback_metric(v, k, radial.nodes, grid.theta, radial.r_inner)
    cv_mass = _control_volume_mass(grid, v, k)

    s2 = nodal.s_rho ** 2
    tt_weight = np.where(s2 > 0, cv_mass / np.where(s2 > 0, s2, 1.0), 0.0) * w_t[None, :]

    diff = sps.diags([-np.ones(n_r), np.ones(n_r)], [0, 1], shape=(n_r, n_r + 1), format="csr")
    avg = sps.diags([0.5 * np.ones(n_r), 0.5 * np.ones(n_r)], [0, 1], shape=(n_r, n_r + 1), format="csr")
    eye_t = sps.identity(n_w, format="csr")
    Gr = sps.kron(diff / h, eye_t, format="csr")
    Gt = sps.kron(sps.identity(n_r + 1, format="csr"), sps.csr_matrix(grid.theta_diff), format="csr")
    Gt_edge = sps.kron(avg, eye_t, format="csr") @ Gt

    W_rr = sps.diags((h * A_rr * w_t[None, :]).ravel())
    W_rt = sps.diags((h * A_rt * w_t[None, :]).ravel())
    W_tt = sps.diags(tt_weight.ravel())

    K = Gr.T @ W_rr @ Gr + Gt.T @ W_tt @ Gt
    if not v.is_zero():
        cross = Gr.T @ W_rt @ Gt_edge
        K = K + cross + cross.T

    mass = (cv_mass * w_t[None, :]).ravel()
    boundary_ds = np.sqrt(nodal.g_tt[0])
    return PulledBackOperator(grid=grid, v=v, stiffness=K.tocsr(), mass=mass, boundary_ds=boundary_ds, metric=nodal)


@dataclass
class AnnulusSolution:
    """u-hat = u o Xi on the fixed grid with the boundary flux data."""

    values: np.ndarray
    residual_norm: float
    boundary_trace: np.ndarray
    boundary_flux: np.ndarray
    operator: PulledBackOperator = field(repr=False)
    lam: float = 0.0
    iterations: int = 0

    @property
    def grid(self) -> AnnulusGrid:
        return self.operator.grid

    def field(self) -> np.ndarray:
        """Values as (radial nodes, wedge angles)."""
        return self.values.reshape(self.grid.shape)

    def perturbation(self, u0: RadialProfile) -> np.ndarray:
        """psi = u-hat - u_{k,lambda} on the grid."""
        return self.field() - u0.values[:, None]


def full_residual(op: PulledBackOperator, lam: float, p: float, values: np.ndarray) -> np.ndarray:
    return lam * op.stiffness.dot(values) + op.mass * (values - np.maximum(values, 0.0) ** p)


def boundary_flux(op: PulledBackOperator, lam: float, p: float, values: np.ndarray) -> np.ndarray:
    """Conormal flux sqrt|g| g^{rj} d_j u at r = r_inner per unit dtheta."""
    n_w = op.grid.n_wedge
    row0 = full_residual(op, lam, p, values)[:n_w]
    return -row0 / (lam * op.grid.theta_weights)


def solve_perturbed(
    v: PerturbationField,
    lam: float,
    u0: RadialProfile,
    grid: AnnulusGrid,
    guess: Optional[np.ndarray] = None,
    settings: Optional[Dict[str, Any]] = None,
) -> AnnulusSolution:
    """
    Newton solve of -lam Delta_{g_v} u + u - (u^+)^p = 0 on the fixed annulus.

    u = 0 on the inner boundary; the pole row keeps the radial value u0(pi/k).

    Args:
        v: Boundary perturbation
        lam: Diffusion parameter (u0 must be solved at the same lambda)
        u0: Radial profile on grid.radial
        grid: Wedge grid
        guess: Initial iterate (default: u0 broadcast, i.e. psi = 0)
        settings: Newton overrides

    Returns:
        AnnulusSolution

    Raises:
        ConvergenceError: v outside the tractable neighbourhood
        SolverError: positivity lost
    """
    if abs(u0.lam - lam) > 1e-14 * max(1.0, lam):
        raise SolverError(f"Radial profile solved at lambda={u0.lam:g}, requested {lam:g}")
    if u0.grid.n != grid.radial.n:
        raise SolverError("Radial profile and annulus grid differ")
    k, p = u0.k, u0.params.p
    op = assemble_operator(grid, v, k)
    n_w = grid.n_wedge
    base = np.repeat(u0.values, n_w)
    x = base.copy() if guess is None else np.asarray(guess, dtype=float).copy()
    x[:n_w] = 0.0
    x[-n_w:] = u0.values[-1]
    free = np.arange(n_w, grid.size - n_w)

    K_ff = (lam * op.stiffness)[free][:, free].tocsr()
    mass_f = op.mass[free]

    def embed(y: np.ndarray) -> np.ndarray:
        out = x.copy()
        out[free] = y
        return out

    def residual(y: np.ndarray) -> np.ndarray:
        return full_residual(op, lam, p, embed(y))[free]

    def jacobian(y: np.ndarray) -> sps.csr_matrix:
        return K_ff + sps.diags(mass_f * (1.0 - p * np.maximum(y, 0.0) ** (p - 1.0)))

    cfg = {"accept_tol": float(solver_section("annulus").get("residual_tol", 1e-10))}
    if settings:
        cfg.update(settings)
    result = damped_newton(residual, jacobian, x[free], mass_f, cfg, label="annulus")
    values = embed(result.x)

    interior = values.reshape(grid.shape)[1:-1]
    if np.min(interior) <= 0.0:
        raise SolverError(f"Perturbed solution not positive (min {np.min(interior):.2e})")

    flux = boundary_flux(op, lam, p, values)
    trace = flux / op.boundary_ds
    logger.debug(f"Annulus solve |v|={v.sup_bound():.2e}, lambda={lam:.8g}: residual {result.residual_norm:.2e}")
    return AnnulusSolution(
        values=values,
        residual_norm=result.residual_norm,
        boundary_trace=trace,
        boundary_flux=flux,
        operator=op,
        lam=lam,
        iterations=result.iterations,
    )
