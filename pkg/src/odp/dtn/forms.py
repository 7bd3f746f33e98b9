"""Quadratic forms of the linearized problem and the boundary trace inequality."""

import logging
from typing import Tuple

import numpy as np

from odp.core.errors import GridError
from odp.core.validation import ensure_matches_grid
from odp.geometry.grid import RadialGrid, dirichlet_energy, mass_integral
from odp.geometry.harmonics import sphere_eigen
from odp.geometry.metric import drift_ratio
from odp.numerics.radial_operator import inverse_square_mass
from odp.radial.cutoff import band_cutoff_max_slope
from odp.radial.solver import RadialProfile
from odp.spectrum.dirichlet import mode_operator

logger = logging.getLogger(__name__)

# Cutoff band of the domain deformation
PULLBACK_INNER = 1.25
PULLBACK_OUTER = 1.5


def quadratic_form_Q(psi: np.ndarray, u: RadialProfile, degree: int) -> float:
    """
    Q^l(phi) = int(lam phi'^2 + c phi^2) S^{d-1} + lam mu int phi^2 S^{d-3} - lam (d-1) k/tan(k) phi(1)^2.

    Args:
        psi: Mode profile on the grid nodes
        u: Sphere profile defining c = 1 - p u^{p-1}
        degree: Harmonic degree l >= 0
    """
    phi = ensure_matches_grid(psi, u.grid.n + 1, "mode profile")
    return mode_operator(u, degree).quadratic_form(phi)


def spectral_theta_derivative(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Derivative along a uniform periodic theta axis by FFT (Nyquist mode dropped)."""
    n = values.shape[axis]
    freq = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        freq[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    spectrum = np.fft.fft(values, axis=axis) * (1j * freq.reshape(shape))
    return np.real(np.fft.ifft(spectrum, axis=axis))


def quadratic_form_field(psi: np.ndarray, u: RadialProfile) -> float:
    """
    Full form Q(psi) for d = 2, psi sampled on (radial nodes) x (uniform theta on [0, 2 pi)).

    For psi = sum phi_l(r) cos(l theta) with l >= 1 this equals pi sum Q^l(phi_l).
    """
    grid = u.grid
    if grid.d != 2:
        raise GridError(f"quadratic_form_field needs d=2, grid has d={grid.d}")
    psi = np.asarray(psi, dtype=float)
    if psi.ndim != 2 or psi.shape[0] != grid.n + 1:
        raise GridError(f"Field has shape {psi.shape}, expected ({grid.n + 1}, n_theta)")
    n_theta = psi.shape[1]
    w_theta = 2.0 * np.pi / n_theta

    radial = mode_operator(u, 0)
    A = radial.full
    volume = float(np.sum(psi * A.dot(psi))) * w_theta
    boundary = radial.lam * radial.curvature * grid.boundary_measure * float(np.sum(psi[0] ** 2)) * w_theta

    dpsi = spectral_theta_derivative(psi, axis=1)
    angular = radial.lam * float(np.sum(inverse_square_mass(grid)[:, None] * dpsi ** 2)) * w_theta
    return volume + angular - boundary


def pullback_trace_constant(k: float, d: int, n_samples: int = 501) -> float:
    """C = max|chi'| + (d-1) max over [1, 3/2] of C_k/S_k."""
    r = np.linspace(1.0, PULLBACK_OUTER, n_samples)
    drift = float(np.max(drift_ratio(k, r)))
    return band_cutoff_max_slope(PULLBACK_INNER, PULLBACK_OUTER) + (d - 1) * drift


def trace_inequality(psi: np.ndarray, grid: RadialGrid, d: int, degree: int) -> Tuple[float, float, float]:
    """
    ||psi||^2 on the boundary against 2 ||grad psi|| ||psi|| + C ||psi||^2.

    psi is the radial profile of psi(r) xi_l with xi_l a unit harmonic.

    Returns:
        (lhs, rhs, C)
    """
    if grid.kind != "sphere":
        raise GridError("trace_inequality needs a sphere grid")
    phi = ensure_matches_grid(psi, grid.n + 1, "mode profile")
    mu = sphere_eigen(degree, d)[0]
    grad_sq = dirichlet_energy(grid, phi) + mu * float(np.dot(inverse_square_mass(grid), phi ** 2))
    l2_sq = mass_integral(grid, phi ** 2)
    C = pullback_trace_constant(grid.k, d)
    lhs = grid.boundary_measure * phi[0] ** 2
    rhs = 2.0 * np.sqrt(grad_sq * l2_sq) + C * l2_sq
    return float(lhs), float(rhs), float(C)
