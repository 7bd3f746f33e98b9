"""Cutoff of the limit profile onto the sphere grid."""

import math
import logging

import numpy as np

from odp.core.errors import ConfigurationError
from odp.exterior.profile import ExteriorProfile
from odp.geometry.grid import RadialGrid

logger = logging.getLogger(__name__)


def smoothstep(t: np.ndarray) -> np.ndarray:
    """Quintic smoothstep: 0 for t <= 0, 1 for t >= 1, C^2 in between."""
    t = np.clip(t, 0.0, 1.0)
    return t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)


def smoothstep_slope(t: np.ndarray) -> np.ndarray:
    inside = (t > 0.0) & (t < 1.0)
    return np.where(inside, 30.0 * t ** 2 * (1.0 - t) ** 2, 0.0)


def band_cutoff(r: np.ndarray, inner: float, outer: float) -> np.ndarray:
    """1 for r <= inner, 0 for r >= outer, quintic in between."""
    return 1.0 - smoothstep((np.asarray(r, dtype=float) - inner) / (outer - inner))


def band_cutoff_derivative(r: np.ndarray, inner: float, outer: float) -> np.ndarray:
    width = outer - inner
    return -smoothstep_slope((np.asarray(r, dtype=float) - inner) / width) / width


def band_cutoff_max_slope(inner: float, outer: float) -> float:
    return 15.0 / 8.0 / (outer - inner)


def cutoff_bands(k: float) -> tuple:
    """(pi/sqrt(k), 2 pi/sqrt(k)): chi_k = 1 below the first, 0 above the second."""
    if not 0.0 < k < 1.0:
        raise ConfigurationError(f"Cutoff bands need pi/sqrt(k) < pi/k, i.e. 0 < k < 1; got k={k}")
    inner = math.pi / math.sqrt(k)
    return inner, 2.0 * inner


def cutoff_function(k: float, r: np.ndarray) -> np.ndarray:
    """chi_k(r), decreasing from 1 to 0 across the band [pi/sqrt(k), 2 pi/sqrt(k)]."""
    return band_cutoff(r, *cutoff_bands(k))


def cutoff_derivative(k: float, r: np.ndarray) -> np.ndarray:
    return band_cutoff_derivative(r, *cutoff_bands(k))


def max_cutoff_slope(k: float) -> float:
    """max |chi_k'| = (15/8) sqrt(k)/pi, below k^{-1/2} for every admissible k."""
    return band_cutoff_max_slope(*cutoff_bands(k))


def cutoff_guess(ext: ExteriorProfile, grid: RadialGrid) -> np.ndarray:
    """
    u~_lambda chi_k sampled on the sphere grid.

    The limit profile is extended by 0 beyond its truncation radius.

    Args:
        ext: Limit profile at the same lambda
        grid: Sphere grid on [1, pi/k]

    Returns:
        Samples on the grid nodes
    """
    if grid.kind != "sphere":
        raise ConfigurationError("cutoff_guess needs a sphere grid")
    if ext.params.d != grid.d:
        raise ConfigurationError(f"Limit profile has d={ext.params.d}, grid has d={grid.d}")
    chi = cutoff_function(grid.k, grid.nodes)
    guess = ext.at(grid.nodes) * chi
    guess[0] = 0.0
    logger.debug(f"Cutoff guess on k={grid.k:g}: band {cutoff_bands(grid.k)}, max {np.max(guess):.4g}")
    return guess
