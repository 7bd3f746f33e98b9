"""Metric factors of the round sphere S^d(k) in geodesic polar coordinates."""

import math
import numpy as np
from typing import Tuple, Union
from scipy.special import gamma

from odp.core.errors import ConfigurationError

ArrayLike = Union[float, np.ndarray]


def metric_factors(k: float, r: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """
    Return S_k(r) = sin(kr)/k and C_k(r) = cos(kr), both zero for r >= pi/k.

    Args:
        k: Curvature parameter (> 0)
        r: Geodesic radius (scalar or array)

    Returns:
        Tuple (S_k, C_k) with the shape of r
    """
    r_arr = np.asarray(r, dtype=float)
    inside = r_arr < math.pi / k
    s = np.where(inside, np.sin(k * r_arr) / k, 0.0)
    c = np.where(inside, np.cos(k * r_arr), 0.0)
    if np.ndim(r) == 0:
        return float(s), float(c)
    return s, c


def mean_curvature(k: float, d: int) -> float:
    """Mean curvature (d-1) k / tan(k) of the unit geodesic sphere."""
    if not 0.0 < k < math.pi:
        raise ConfigurationError(f"mean_curvature needs 0 < k < pi, got k={k}")
    return (d - 1) * k * math.cos(k) / math.sin(k)


def boundary_curvature(k: float, d: int, r_inner: float = 1.0) -> float:
    """Mean curvature (d-1) C_k/S_k of the geodesic sphere of radius r_inner."""
    if not 0.0 < k * r_inner < math.pi:
        raise ConfigurationError(f"boundary_curvature needs 0 < k*r_inner < pi, got {k * r_inner}")
    return (d - 1) * k * math.cos(k * r_inner) / math.sin(k * r_inner)


def drift_ratio(k: float, r: ArrayLike) -> ArrayLike:
    """C_k/S_k, the radial drift of the Laplace-Beltrami operator (for r < pi/k)."""
    s, c = metric_factors(k, r)
    return np.asarray(c) / np.asarray(s)


def unit_sphere_measure(d: int) -> float:
    """omega_{d-1}, the (d-1)-dimensional measure of the unit sphere S^{d-1}."""
    return float(2.0 * math.pi ** (d / 2.0) / gamma(d / 2.0))


def sphere_volume_integral(k: float, d: int, r_inner: float = 1.0) -> float:
    """Closed form of the integral of S_k^{d-1} over [r_inner, pi/k]."""
    x = k * r_inner
    m = d - 1
    # I_m = int_x^pi sin^m, via I_m = sin^{m-1}(x) cos(x)/m + (m-1)/m I_{m-2}
    if m % 2 == 0:
        value, start = math.pi - x, 2
    else:
        value, start = 1.0 + math.cos(x), 3
    for j in range(start, m + 1, 2):
        value = math.sin(x) ** (j - 1) * math.cos(x) / j + (j - 1) / j * value
    return value / k ** d
