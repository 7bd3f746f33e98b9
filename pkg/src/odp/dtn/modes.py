"""Per-mode boundary value solves and eigenvalues of the linearized DtN operator.

For a degree-l boundary datum v = xi_l (a unit harmonic on S^{d-1}) the
linearized solution is psi_l(r) xi_l with psi_l(1) = 1, and

    H(xi_l) = h_l xi_l,    h_l = -psi_l'(1) - (d-1) C_k(1)/S_k(1).

The normal points out of S^d(k) minus B_1, i.e. nu = -d/dr on the inner
boundary. psi_l'(1) is read from the boundary row of the conservative
stencil, so lam h_l W(1) equals the discrete quadratic form Q^l(psi_l).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import norm as sparse_norm, splu

from odp.core.config import solver_section
from odp.core.errors import SingularModeError, SpectrumError
from odp.geometry.harmonics import sphere_eigen
from odp.numerics.eigen import smallest_eigenpairs
from odp.numerics.radial_operator import DirichletModeOperator
from odp.radial.solver import RadialProfile
from odp.spectrum.dirichlet import mode_operator

logger = logging.getLogger(__name__)

DEFLATION_PAIRS = 3


@dataclass
class ModeSpectrumEntry:
    """One admissible degree with its DtN eigenvalue and boundary-value profile."""

    l: int
    mu: float
    mult: int
    h: float
    psi: np.ndarray = field(repr=False)
    cond: float
    residual: float = 0.0
    fallback: bool = False
    multipliers: Optional[Tuple[float, float]] = None

    def to_dict(self) -> Dict:
        out = {
            "l": self.l,
            "mu": self.mu,
            "mult": self.mult,
            "h": self.h,
            "cond": self.cond,
            "residual": self.residual,
            "fallback": self.fallback,
        }
        if self.multipliers is not None:
            out["multipliers"] = list(self.multipliers)
        return out


def _cond_max() -> float:
    return float(solver_section("dtn").get("cond_max", 1e12))


def solve_mode_bvp(u: RadialProfile, degree: int) -> Tuple[np.ndarray, DirichletModeOperator, float]:
    """
    psi_l with psi_l(1) = 1 solving the mode-l linearized equation.

    Returns:
        (psi on all nodes, the mode operator, condition estimate)

    Raises:
        SingularModeError: when the condition estimate exceeds dtn.cond_max
    """
    op = mode_operator(u, degree)
    cond = op.condition_estimate()
    if cond > _cond_max():
        raise SingularModeError(
            f"Mode {degree} Dirichlet operator near-singular at lambda={u.lam:g} (cond {cond:.2e})",
            degree,
            cond,
        )
    return op.solve_boundary(1.0), op, cond


def auxiliary_theta(u: RadialProfile) -> np.ndarray:
    """Radial solution of the linearized equation with boundary value 1."""
    psi, _, _ = solve_mode_bvp(u, 0)
    return psi


def dtn_value(op: DirichletModeOperator, psi: np.ndarray) -> float:
    """h = -psi'(1)/psi(1) - boundary curvature."""
    return -op.boundary_derivative(psi) / psi[0] - op.curvature


def dtn_eigenvalue(u: RadialProfile, degree: int) -> float:
    """h_l = -psi_l'(1) - (d-1) k / tan(k)."""
    psi, op, _ = solve_mode_bvp(u, degree)
    return dtn_value(op, psi)


def steklov_schur(op: DirichletModeOperator, count: int = DEFLATION_PAIRS) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Boundary Schur complement a_bb - f^T A^{-1} f of a mode operator.

    The lowest Dirichlet pairs (t_i, v_i) are summed explicitly. The
    remainder is solved on the mass-orthogonal complement of their span
    through the bordered system [[A, M V], [V^T M, 0]], which stays
    nonsingular when t_1 passes through zero.

    Returns:
        (Schur complement, psi on the free nodes for psi(1) = 1, bordered correction M V nu)
    """
    A, mass = op.matrix, op.mass
    n = A.shape[0]
    f = op.full[op.interior][:, [0]].toarray().ravel()
    a_bb = float(op.full[0, 0])

    count = min(count, n - 2)
    t, V = smallest_eigenpairs(A, mass, count)
    MV = mass[:, None] * V
    c = V.T @ f
    g = f - MV @ c
    bordered = sps.bmat([[A, sps.csc_matrix(MV)], [sps.csc_matrix(MV.T), None]], format="csc")
    solution = splu(bordered).solve(np.concatenate((g, np.zeros(count))))
    y, nu = solution[:n], solution[n:]

    interior = -(V @ (c / t) + y)
    return a_bb + float(f @ interior), interior, MV @ nu


def steklov_fallback(u: RadialProfile, degree: int, pair=None) -> Tuple[float, np.ndarray, Tuple[float, float]]:
    """
    Steklov eigenvalue of mode l through the Dirichlet eigen-expansion.

    Args:
        u: Sphere profile
        degree: Harmonic degree l >= 1
        pair: Principal pair; when given, the z-orthogonality multiplier uses z

    Returns:
        (eta, psi with psi(1) = 1, multipliers (deflation, z-orthogonality))

    Raises:
        SpectrumError: if a multiplier exceeds dtn.multiplier_tol
    """
    op = mode_operator(u, degree)
    idx = op.interior
    schur, interior, correction = steklov_schur(op)
    eta = schur / (op.lam * op.grid.boundary_measure)

    psi = np.zeros(op.grid.n + 1)
    psi[0] = 1.0
    psi[idx] = interior

    coupling = op.full[idx][:, [0]].toarray().ravel()
    scale = float(np.max(np.abs(coupling)))
    theta0 = float(np.max(np.abs(correction))) / scale
    theta2 = 0.0
    if pair is not None:
        z = pair.z[idx]
        residual = op.full.dot(psi)[idx]
        norm = float(np.linalg.norm(z)) * (sparse_norm(op.matrix, np.inf) * float(np.linalg.norm(interior)) + scale)
        theta2 = float(z @ residual) / norm
    tol = float(solver_section("dtn").get("multiplier_tol", 1e-10))
    if max(abs(theta0), abs(theta2)) > tol:
        raise SpectrumError(f"Steklov multipliers ({theta0:.2e}, {theta2:.2e}) exceed {tol:g} for mode {degree}")
    logger.info(f"Steklov fallback for mode {degree} at lambda={u.lam:g}: eta={eta:.8g}")
    return eta, psi, (theta0, theta2)


def mode_entry(u: RadialProfile, degree: int, mult: Optional[int] = None, pair=None) -> ModeSpectrumEntry:
    """Direct solve, or the Steklov fallback when the mode operator is near-singular."""
    mu, default_mult = sphere_eigen(degree, u.params.d)
    mult = default_mult if mult is None else mult
    try:
        psi, op, cond = solve_mode_bvp(u, degree)
    except SingularModeError as e:
        logger.warning(f"{e}; switching to the Steklov fallback")
        eta, psi, multipliers = steklov_fallback(u, degree, pair)
        op = mode_operator(u, degree)
        return ModeSpectrumEntry(
            l=degree,
            mu=mu,
            mult=mult,
            h=eta - op.curvature,
            psi=psi,
            cond=e.cond,
            residual=op.interior_residual(psi),
            fallback=True,
            multipliers=multipliers,
        )
    return ModeSpectrumEntry(
        l=degree,
        mu=mu,
        mult=mult,
        h=dtn_value(op, psi),
        psi=psi,
        cond=cond,
        residual=op.interior_residual(psi),
    )
