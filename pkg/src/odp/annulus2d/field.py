"""Dihedral boundary perturbations and the (r, theta) grid on a fundamental wedge."""

import math
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sps

from odp.core.errors import ConfigurationError
from odp.geometry.grid import RadialGrid, make_sphere_grid

logger = logging.getLogger(__name__)

MAX_SUP_NORM = 0.25


@dataclass(frozen=True)
class PerturbationField:
    """v(theta) = sum_j a_j cos(j n theta), j = 1..J."""

    fourier: tuple
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ConfigurationError(f"Dihedral order n={self.n} must be >= 2")
        if not self.fourier:
            raise ConfigurationError("PerturbationField needs at least one coefficient")
        object.__setattr__(self, "fourier", tuple(float(a) for a in self.fourier))
        sup = self.sup_bound()
        if sup >= MAX_SUP_NORM:
            raise ConfigurationError(f"|v| may reach {sup:.3g}, must stay below {MAX_SUP_NORM}")

    @classmethod
    def single_mode(cls, n: int, j: int, amplitude: float, n_modes: Optional[int] = None) -> "PerturbationField":
        """amplitude * cos(j n theta), padded with zeros to n_modes coefficients."""
        size = max(j, n_modes or j)
        coeffs = [0.0] * size
        coeffs[j - 1] = amplitude
        return cls(tuple(coeffs), n)

    @classmethod
    def zero(cls, n: int, n_modes: int = 1) -> "PerturbationField":
        return cls(tuple([0.0] * n_modes), n)

    @property
    def amplitude(self) -> float:
        return self.fourier[0]

    @property
    def n_modes(self) -> int:
        return len(self.fourier)

    def degrees(self) -> np.ndarray:
        return self.n * np.arange(1, self.n_modes + 1)

    def sup_bound(self) -> float:
        return float(np.sum(np.abs(self.fourier)))

    def is_zero(self) -> bool:
        return not any(self.fourier)

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return np.cos(np.multiply.outer(theta, self.degrees())) @ np.asarray(self.fourier)

    def derivative(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        m = self.degrees()
        return -np.sin(np.multiply.outer(theta, m)) @ (m * np.asarray(self.fourier))

    def scaled(self, factor: float) -> "PerturbationField":
        return PerturbationField(tuple(factor * a for a in self.fourier), self.n)

    def with_coefficients(self, coeffs: Sequence[float]) -> "PerturbationField":
        return PerturbationField(tuple(coeffs), self.n)


def fourier_diff_matrix(n_theta: int) -> np.ndarray:
    """Spectral first derivative on the uniform periodic grid 2 pi j / n_theta (n_theta even)."""
    if n_theta % 2:
        raise ConfigurationError(f"Fourier differentiation needs an even point count, got {n_theta}")
    h = 2.0 * math.pi / n_theta
    j = np.arange(n_theta)
    diff = j[:, None] - j[None, :]
    D = np.zeros((n_theta, n_theta))
    off = diff != 0
    D[off] = 0.5 * (-1.0) ** diff[off] / np.tan(0.5 * h * diff[off])
    return D


def unfold_matrix(n_theta: int, n: int) -> sps.csr_matrix:
    """Map wedge samples (theta in [0, pi/n]) to the full circle by the dihedral symmetry."""
    period = n_theta // n
    half = period // 2
    rows = np.arange(n_theta)
    m = rows % period
    cols = np.where(m <= half, m, period - m)
    return sps.csr_matrix((np.ones(n_theta), (rows, cols)), shape=(n_theta, half + 1))


@dataclass(frozen=True)
class AnnulusGrid:
    """Radial sphere grid times the theta nodes of the wedge [0, pi/n]."""

    radial: RadialGrid
    n: int
    n_theta: int
    theta: np.ndarray
    theta_weights: np.ndarray
    theta_diff: np.ndarray
    unfold: sps.csr_matrix

    @property
    def n_wedge(self) -> int:
        return len(self.theta)

    @property
    def shape(self):
        return (self.radial.n + 1, self.n_wedge)

    @property
    def size(self) -> int:
        return (self.radial.n + 1) * self.n_wedge

    @property
    def full_theta(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def symmetry_factor(self) -> int:
        """Full-circle sums equal this factor times weighted wedge sums."""
        return 2 * self.n

    def to_full(self, values: np.ndarray) -> np.ndarray:
        """Unfold (..., n_wedge) samples to (..., n_theta)."""
        values = np.asarray(values)
        return (self.unfold @ values.reshape(-1, self.n_wedge).T).T.reshape(values.shape[:-1] + (self.n_theta,))

    def wedge_mean(self, values: np.ndarray, weights: Optional[np.ndarray] = None) -> float:
        w = self.theta_weights if weights is None else self.theta_weights * weights
        return float(np.dot(w, values) / np.sum(w))

    def project(self, values: np.ndarray, j: int) -> float:
        """Coefficient of cos(j n theta) in a dihedral function sampled on the wedge."""
        basis = np.cos(j * self.n * self.theta)
        return float(self.symmetry_factor / math.pi * np.dot(self.theta_weights, values * basis))


def make_annulus_grid(
    k: float,
    n: int,
    n_r: int,
    n_theta: int,
    r_inner: float = 1.0,
    radial: Optional[RadialGrid] = None,
) -> AnnulusGrid:
    """
    Product grid for d = 2 with n_theta full-circle points (a multiple of 4n).

    Args:
        k: Curvature parameter
        n: Dihedral order
        n_r: Radial cells
        n_theta: Points on the full circle
        r_inner: Radius of the excised ball
        radial: Reuse an existing radial sphere grid

    Returns:
        AnnulusGrid on [r_inner, pi/k] x [0, pi/n]
    """
    if n < 2:
        raise ConfigurationError(f"Dihedral order n={n} must be >= 2")
    if n_theta % (4 * n):
        raise ConfigurationError(f"n_theta={n_theta} must be a multiple of 4n={4 * n}")
    radial = radial or make_sphere_grid(k, 2, n=n_r, r_inner=r_inner)
    if radial.d != 2:
        raise ConfigurationError("The annulus grid needs d=2")
    unfold = unfold_matrix(n_theta, n)
    n_wedge = unfold.shape[1]
    h = 2.0 * math.pi / n_theta
    weights = np.full(n_wedge, h)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    D = fourier_diff_matrix(n_theta)
    theta_diff = (D @ unfold.toarray())[:n_wedge]
    return AnnulusGrid(
        radial=radial,
        n=n,
        n_theta=n_theta,
        theta=h * np.arange(n_wedge),
        theta_weights=weights,
        theta_diff=theta_diff,
        unfold=unfold,
    )
