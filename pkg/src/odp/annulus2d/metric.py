"""Pullback of the round metric through Xi(r, theta) = ((1 + chi(r) v(theta)) r, theta).

With a = 1 + chi v + chi' v r and b = chi r the pulled-back metric is

    g_v = a^2 dr^2 + 2 a b v' dr dtheta + (b^2 v'^2 + S_k(rho)^2) dtheta^2,   rho = (1 + chi v) r,

so sqrt|g| = a S_k(rho). The divergence-form coefficients sqrt|g| g^{ij} are

    A_rr = (b^2 v'^2 + S^2) / (a S),   A_rt = -b v' / S,   A_tt = a / S.
"""

import math
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from odp.core.config import solver_section
from odp.core.errors import ConfigurationError
from odp.geometry.metric import metric_factors
from odp.radial.cutoff import band_cutoff, band_cutoff_derivative
from odp.annulus2d.field import PerturbationField

logger = logging.getLogger(__name__)


def cutoff_band(r_inner: float = 1.0) -> tuple:
    """(inner, outer) radii of the deformation cutoff, scaled with the ball radius."""
    cfg = solver_section("annulus")
    return float(cfg.get("cutoff_inner", 1.25)) * r_inner, float(cfg.get("cutoff_outer", 1.5)) * r_inner


def pullback_cutoff(r: np.ndarray, r_inner: float = 1.0) -> np.ndarray:
    """chi = 1 for r <= 5/4, 0 for r >= 3/2 (in units of the ball radius)."""
    return band_cutoff(r, *cutoff_band(r_inner))


def pullback_cutoff_derivative(r: np.ndarray, r_inner: float = 1.0) -> np.ndarray:
    return band_cutoff_derivative(r, *cutoff_band(r_inner))


@dataclass
class MetricField:
    """Samples of a, b, v', S_k(rho) on an (r, theta) grid."""

    a: np.ndarray
    b: np.ndarray
    dv: np.ndarray
    s_rho: np.ndarray
    rho: np.ndarray

    @property
    def volume_density(self) -> np.ndarray:
        return self.a * self.s_rho

    @property
    def g_rr(self) -> np.ndarray:
        return self.a ** 2

    @property
    def g_rt(self) -> np.ndarray:
        return self.a * self.b * self.dv

    @property
    def g_tt(self) -> np.ndarray:
        return self.b ** 2 * self.dv ** 2 + self.s_rho ** 2

    def coefficients(self):
        """(A_rr, A_rt, A_tt) = sqrt|g| g^{ij}, defined where S_k(rho) > 0."""
        s = self.s_rho
        with np.errstate(divide="ignore", invalid="ignore"):
            A_rr = np.where(s > 0, self.g_tt / (self.a * s), 0.0)
            A_rt = np.where(s > 0, -self.b * self.dv / s, 0.0)
            A_tt = np.where(s > 0, self.a / s, 0.0)
        return A_rr, A_rt, A_tt


def pullback_metric(v: PerturbationField, k: float, r: np.ndarray, theta: np.ndarray, r_inner: float = 1.0) -> MetricField:
    """
    Metric samples on the tensor grid r x theta.

    Args:
        v: Boundary perturbation
        k: Curvature parameter
        r: Radii (1D)
        theta: Angles (1D)
        r_inner: Ball radius (sets the cutoff band)

    Returns:
        MetricField with arrays of shape (len(r), len(theta))

    Raises:
        ConfigurationError: if the volume density is not positive (Xi not a diffeomorphism)
    """
    r = np.asarray(r, dtype=float)[:, None]
    vt = v(theta)[None, :]
    dvt = v.derivative(theta)[None, :]
    chi = pullback_cutoff(r, r_inner)
    dchi = pullback_cutoff_derivative(r, r_inner)
    a = 1.0 + chi * vt + dchi * vt * r
    b = chi * r
    rho = (1.0 + chi * vt) * r
    s_rho = np.asarray(metric_factors(k, rho)[0])
    interior = r[:, 0] < math.pi / k
    if np.any(a <= 0.0) or np.any(s_rho[interior] <= 0.0):
        raise ConfigurationError(f"Perturbation too large: pullback volume density not positive (min a={np.min(a):.3g})")
    return MetricField(a=a, b=b, dv=dvt * np.ones_like(a), s_rho=s_rho, rho=rho)


def domain_outline(v: PerturbationField, k: float, n_points: int = 721, r_inner: float = 1.0) -> pd.DataFrame:
    """
    Boundary of the geodesic ball of radius r_inner (1 + v(theta)) on the sphere of radius 1/k.

    Returns:
        DataFrame with theta, rho (geodesic radius), x, y (azimuthal-equidistant
        chart) and X, Y, Z (embedding in R^3, south pole at -1/k)
    """
    theta = np.linspace(0.0, 2.0 * math.pi, n_points)
    rho = r_inner * (1.0 + v(theta))
    s = np.sin(k * rho) / k
    return pd.DataFrame(
        {
            "theta": theta,
            "rho": rho,
            "x": rho * np.cos(theta),
            "y": rho * np.sin(theta),
            "X": s * np.cos(theta),
            "Y": s * np.sin(theta),
            "Z": -np.cos(k * rho) / k,
        }
    )
