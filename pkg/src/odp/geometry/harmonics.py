"""Laplace-Beltrami eigendata on S^{d-1} and angular quadrature."""

import math
import numpy as np
from typing import Tuple
from scipy.special import roots_gegenbauer, eval_gegenbauer

from odp.core.errors import ConfigurationError


def sphere_eigen(i: int, d: int) -> Tuple[float, int]:
    """
    Eigenvalue and multiplicity of degree-i spherical harmonics on S^{d-1}.

    Args:
        i: Harmonic degree (>= 0)
        d: Ambient dimension (>= 2)

    Returns:
        Tuple (mu, mult) with mu = i(i+d-2)
    """
    if i < 0 or d < 2:
        raise ConfigurationError(f"sphere_eigen needs i >= 0 and d >= 2, got i={i}, d={d}")
    mu = float(i * (i + d - 2))
    if i == 0:
        return mu, 1
    if d == 2:
        return mu, 2
    return mu, math.comb(i + d - 1, d - 1) - math.comb(i + d - 3, d - 1)


def angular_mean(degree: int, d: int, n_quad: int = 64) -> float:
    """
    Mean over S^{d-1} of the zonal degree-l harmonic.

    Fourier nodes for d = 2, Gauss-Gegenbauer nodes for d >= 3.
    """
    if d == 2:
        theta = 2.0 * np.pi * np.arange(n_quad) / n_quad
        return float(np.mean(np.cos(degree * theta)))
    alpha = (d - 2) / 2.0
    x, w = roots_gegenbauer(n_quad, alpha)
    values = eval_gegenbauer(degree, alpha, x)
    return float(np.dot(w, values) / np.sum(w))


def cosine_mode(degree: int, theta: np.ndarray) -> np.ndarray:
    """cos(l theta) normalized to unit L2 norm on the circle."""
    return np.cos(degree * theta) / math.sqrt(math.pi)
