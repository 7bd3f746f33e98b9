"""DtN report over the admissible modes of a symmetry group."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from odp.core.errors import ConfigurationError
from odp.dtn.forms import quadratic_form_Q
from odp.dtn.modes import ModeSpectrumEntry, auxiliary_theta, mode_entry
from odp.geometry.harmonics import angular_mean
from odp.geometry.symmetry import SymmetryGroup, validate_group
from odp.radial.solver import RadialProfile
from odp.spectrum.dirichlet import PrincipalPair, mode_operator, principal_dirichlet_pair

logger = logging.getLogger(__name__)


@dataclass
class DtnReport:
    """sigma_1, the index i(lambda), the per-mode table and the identity residuals."""

    k: float
    lam: float
    group: str
    entries: List[ModeSpectrumEntry]
    sigma1: float
    index: int
    identity_residuals: Dict[str, float]
    theta: np.ndarray = field(repr=False)

    def h_table(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"l": e.l, "mu": e.mu, "mult": e.mult, "h": e.h} for e in self.entries],
            columns=["l", "mu", "mult", "h"],
        )

    def h(self, degree: int) -> float:
        for entry in self.entries:
            if entry.l == degree:
                return entry.h
        raise KeyError(degree)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "lambda": self.lam,
            "group": self.group,
            "sigma1": self.sigma1,
            "index": self.index,
            "identity_residuals": dict(self.identity_residuals),
            "entries": [e.to_dict() for e in self.entries],
        }


def form_identity_residual(u: RadialProfile, entry: ModeSpectrumEntry) -> float:
    """Relative mismatch of lam h W(1) psi(1)^2 against Q^l(psi)."""
    q = quadratic_form_Q(entry.psi, u, entry.l)
    lhs = u.lam * entry.h * u.grid.boundary_measure * entry.psi[0] ** 2
    return abs(lhs - q) / max(abs(q), abs(lhs), 1e-300)


def orthogonality_check(psi: np.ndarray, pair: PrincipalPair, u: RadialProfile, degree: int) -> Tuple[float, float]:
    """
    Residuals of int psi z = 0 and of the boundary mean of d_nu psi = 0.

    psi is the radial factor of psi(r) xi_l; both integrals factor through
    the angular mean of xi_l, which vanishes for l >= 1.
    """
    if degree < 1:
        raise ConfigurationError(f"orthogonality_check needs l >= 1, got {degree}")
    grid = u.grid
    harmonic_mean = angular_mean(degree, grid.d)
    op = mode_operator(u, degree)
    res1 = abs(float(np.dot(grid.cell_volumes, psi * pair.z)) * harmonic_mean)
    res2 = abs(-op.boundary_derivative(psi) * grid.boundary_measure * harmonic_mean)
    return res1, res2


def green_boundary_residual(psi: np.ndarray, theta: np.ndarray, u: RadialProfile, degree: int) -> float:
    """Boundary integral of (d_nu psi theta - d_nu theta psi) for psi(r) xi_l."""
    grid = u.grid
    dpsi = mode_operator(u, degree).boundary_derivative(psi)
    dtheta = mode_operator(u, 0).boundary_derivative(theta)
    integrand = -dpsi * theta[0] + dtheta * psi[0]
    return abs(integrand * grid.boundary_measure * angular_mean(degree, grid.d))


def dtn_report(u: RadialProfile, group: SymmetryGroup, pair: Optional[PrincipalPair] = None) -> DtnReport:
    """
    DtN eigenvalues over the group's admissible modes at the profile's (k, lambda).

    Args:
        u: Sphere profile
        group: Symmetry group satisfying (G)
        pair: Principal pair (computed when omitted)

    Returns:
        DtnReport with sigma1 = min h_l and index = sum of m_l over h_l < 0
    """
    group = validate_group(group)
    pair = pair or principal_dirichlet_pair(u)
    theta = auxiliary_theta(u)

    entries = [mode_entry(u, degree, mult, pair) for degree, mult in group.allowed_modes]
    sigma1 = min(e.h for e in entries)
    index = sum(e.mult for e in entries if e.h < 0.0)

    identity = max(form_identity_residual(u, e) for e in entries)
    ortho = [orthogonality_check(e.psi, pair, u, e.l) for e in entries]
    green = max(green_boundary_residual(e.psi, theta, u, e.l) for e in entries)
    residuals = {
        "form_identity": identity,
        "z_orthogonality": max(r[0] for r in ortho),
        "boundary_flux_mean": max(r[1] for r in ortho),
        "green_boundary": green,
        "mode_residual": max(e.residual for e in entries),
    }
    logger.info(
        f"DtN at k={u.k:g}, lambda={u.lam:.8g}: sigma1={sigma1:.6g}, index={index}, "
        f"form identity {identity:.2e}"
    )
    return DtnReport(
        k=u.k,
        lam=u.lam,
        group=group.name,
        entries=entries,
        sigma1=sigma1,
        index=index,
        identity_residuals=residuals,
        theta=theta,
    )
