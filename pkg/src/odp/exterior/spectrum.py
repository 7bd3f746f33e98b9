"""Linearized spectrum and Dirichlet-to-Neumann values of the limit problem."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from odp.core.config import solver_section
from odp.core.errors import ConfigurationError, SingularModeError, SpectrumError
from odp.exterior.profile import ExteriorProfile
from odp.geometry.grid import k_norm
from odp.numerics.eigen import smallest_eigenpairs
from odp.numerics.radial_operator import build_mode_operator

logger = logging.getLogger(__name__)


@dataclass
class LimitSpectrum:
    """Principal pair (tau~, z~) and the second radial eigenvalue."""

    tau_tilde: float
    z_tilde: np.ndarray
    second_eig: float

    @property
    def morse_index(self) -> int:
        return int(self.tau_tilde < 0) + int(self.second_eig < 0)


def exterior_linearized_spectrum(profile: ExteriorProfile) -> LimitSpectrum:
    """
    Two smallest eigenvalues of -lam Delta + 1 - p u~^{p-1} on radial functions.

    Raises:
        SpectrumError: unless tau~ < 0 < second eigenvalue
    """
    op = build_mode_operator(profile.grid, profile.values, profile.params.p, profile.lam, 0)
    tol = float(solver_section("eigen").get("tol", 1e-13))
    values, vectors = smallest_eigenpairs(op.matrix, op.mass, 2, tol)
    z = np.zeros(profile.grid.n + 1)
    z[op.interior] = vectors[:, 0]
    z /= k_norm(z, profile.grid, profile.grid.d)
    tau, second = float(values[0]), float(values[1])
    if not tau < 0.0 < second:
        raise SpectrumError(
            f"Limit spectrum at lambda={profile.lam:g} has sign pattern ({tau:.4g}, {second:.4g}), expected (-, +)"
        )
    return LimitSpectrum(tau_tilde=tau, z_tilde=z, second_eig=second)


def limit_radial_eigenvalues(profile: ExteriorProfile, count: int = 2) -> np.ndarray:
    """Smallest radial Dirichlet eigenvalues, no sign-pattern check."""
    op = build_mode_operator(profile.grid, profile.values, profile.params.p, profile.lam, 0)
    values, _ = smallest_eigenpairs(op.matrix, op.mass, count)
    return values


def limit_mode_eigenvalue(profile: ExteriorProfile, degree: int) -> float:
    """Lowest Dirichlet eigenvalue of the mode-l limit operator."""
    op = build_mode_operator(profile.grid, profile.values, profile.params.p, profile.lam, degree)
    values, _ = smallest_eigenpairs(op.matrix, op.mass, 1)
    return float(values[0])


def limit_dtn_value(profile: ExteriorProfile, degree: int, spectrum: Optional[LimitSpectrum] = None) -> float:
    """
    h~_l = -psi'(1) - (d-1) for the decaying mode-l solution with psi(1) = 1.

    Args:
        profile: Limit profile
        degree: Harmonic degree l >= 1
        spectrum: When given, its Morse-index-one sign pattern is required

    Raises:
        SingularModeError: when the mode Dirichlet operator is near-singular
    """
    if degree < 1:
        raise ConfigurationError(f"limit_dtn_value needs degree >= 1, got {degree}")
    if spectrum is not None and spectrum.morse_index != 1:
        raise SpectrumError(f"Limit problem at lambda={profile.lam:g} is not of Morse index 1")
    op = build_mode_operator(profile.grid, profile.values, profile.params.p, profile.lam, degree)
    cond = op.condition_estimate()
    cond_max = float(solver_section("dtn").get("cond_max", 1e12))
    if cond > cond_max:
        raise SingularModeError(f"Mode {degree} limit operator near-singular (cond {cond:.2e})", degree, cond)
    psi = op.solve_boundary(1.0)
    return -op.boundary_derivative(psi) - op.curvature
