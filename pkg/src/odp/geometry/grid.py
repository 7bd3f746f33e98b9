"""Radial grids, quadrature and the conservative radial stencil.

A grid carries three families of weights for the measure W(r) dr, where
W = S_k^{d-1} on the sphere and W = r^{d-1} on the exterior domain:

* ``cell_volumes``: integrals of W over the node control volumes
  [r_i - h/2, r_i + h/2] (half cells at the ends). They are the mass of the
  finite-volume stencil.
* ``edge_weights``: W at the cell faces r_{i+1/2}, the stiffness coefficients.
* ``quad_weights``: product-Simpson weights, exact for piecewise quadratics
  against W. Used by ``integrate``.

Quadratic forms, energies and norms built from the first two families satisfy
the discrete Green identity exactly, which is what the identity checks of the
spectral modules rely on.
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sps

from odp.core.errors import ConfigurationError, GridError
from odp.core.validation import ensure_matches_grid, ensure_strictly_increasing
from odp.geometry.metric import metric_factors, sphere_volume_integral

logger = logging.getLogger(__name__)

DEFAULT_GAUSS_POINTS = 8


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid on [r_inner, r_end] with finite-volume weights."""

    nodes: np.ndarray
    quad_weights: np.ndarray
    cell_volumes: np.ndarray
    edge_weights: np.ndarray
    pole_flag: bool
    d: int
    k: Optional[float]
    kind: str

    @property
    def n(self) -> int:
        """Number of cells N (nodes are r_0..r_N)."""
        return len(self.nodes) - 1

    @property
    def h(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def r_inner(self) -> float:
        return float(self.nodes[0])

    @property
    def r_end(self) -> float:
        return float(self.nodes[-1])

    def weight(self, r: np.ndarray) -> np.ndarray:
        """The radial density W(r)."""
        return _weight_function(self.kind, self.k, self.d)(np.asarray(r, dtype=float))

    @property
    def boundary_measure(self) -> float:
        """W(r_inner): surface density of the inner boundary sphere."""
        return float(self.weight(np.array([self.r_inner]))[0])

    def integrate(self, values: np.ndarray) -> float:
        """Integral of sampled f against W dr (product Simpson)."""
        f = ensure_matches_grid(values, len(self.nodes), "integrand")
        return float(np.dot(self.quad_weights, f))

    def sphere_factor(self) -> np.ndarray:
        """S_k (or r on the exterior) at the nodes."""
        if self.kind == "sphere":
            return np.asarray(metric_factors(self.k, self.nodes)[0])
        return self.nodes.copy()


def _weight_function(kind: str, k: Optional[float], d: int) -> Callable[[np.ndarray], np.ndarray]:
    if kind == "sphere":
        return lambda r: np.asarray(metric_factors(k, r)[0]) ** (d - 1)
    return lambda r: np.asarray(r) ** (d - 1)


def _gauss_integrals(weight: Callable, a: np.ndarray, b: np.ndarray, n_gauss: int, f: Optional[Callable] = None) -> np.ndarray:
    """Integrals of weight (times f) over the intervals [a_j, b_j]."""
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = weight(pts)
    if f is not None:
        vals = vals * f(pts)
    return (vals * w[None, :]).sum(axis=1) * half


def _build_grid(nodes: np.ndarray, kind: str, k: Optional[float], d: int, pole_flag: bool, n_gauss: int) -> RadialGrid:
    ensure_strictly_increasing(nodes)
    weight = _weight_function(kind, k, d)
    h = nodes[1] - nodes[0]
    n = len(nodes) - 1

    # Control volumes: left halves for nodes 1..N, right halves for nodes 0..N-1
    volumes = np.zeros(n + 1)
    volumes[1:] += _gauss_integrals(weight, nodes[1:] - 0.5 * h, nodes[1:], n_gauss)
    volumes[:-1] += _gauss_integrals(weight, nodes[:-1], nodes[:-1] + 0.5 * h, n_gauss)

    edges = weight(nodes[:-1] + 0.5 * h)

    quad = _product_simpson(nodes, weight, n_gauss)

    return RadialGrid(
        nodes=nodes,
        quad_weights=quad,
        cell_volumes=volumes,
        edge_weights=np.asarray(edges, dtype=float),
        pole_flag=pole_flag,
        d=d,
        k=k,
        kind=kind,
    )


def _product_simpson(nodes: np.ndarray, weight: Callable, n_gauss: int) -> np.ndarray:
    """Weights integrating piecewise-quadratic interpolants exactly against W."""
    n = len(nodes) - 1
    h = nodes[1] - nodes[0]
    quad = np.zeros(n + 1)
    starts = nodes[0:n:2]
    basis = [
        lambda t: 0.5 * (t - 1.0) * (t - 2.0),
        lambda t: -t * (t - 2.0),
        lambda t: 0.5 * t * (t - 1.0),
    ]
    for m, phi in enumerate(basis):
        for cell in (0, 1):
            a = starts + cell * h
            b = a + h
            f = lambda r, a0=starts, phi=phi: phi((r - a0[:, None]) / h)
            quad[m:n + 1:2][: len(starts)] += _gauss_integrals(weight, a, b, n_gauss, f)
    # Lump a negative pole weight (d >= 3) into its neighbour
    if quad[-1] < 0.0:
        quad[-2] += quad[-1]
        quad[-1] = 0.0
    return quad


def _even(n: int) -> int:
    return int(n) + (int(n) % 2)


def make_sphere_grid(
    k: float,
    d: int,
    n: Optional[int] = None,
    spacing: Optional[float] = None,
    r_inner: float = 1.0,
    n_gauss: int = DEFAULT_GAUSS_POINTS,
) -> RadialGrid:
    """
    Uniform grid on [r_inner, pi/k] with the S_k^{d-1} weight.

    Args:
        k: Curvature parameter
        d: Dimension
        n: Number of cells (rounded up to even)
        spacing: Target spacing, used when n is None
        r_inner: Radius of the excised ball
        n_gauss: Gauss points per half cell

    Returns:
        RadialGrid with pole_flag set
    """
    r_end = math.pi / k
    if not r_inner < r_end:
        raise ConfigurationError(f"Ball radius {r_inner} does not fit below the pole pi/k={r_end:g}")
    if n is None:
        if spacing is None:
            raise ConfigurationError("make_sphere_grid needs n or spacing")
        n = math.ceil((r_end - r_inner) / spacing)
    n = _even(n)
    if n < 4:
        raise ConfigurationError(f"Grid needs at least 4 cells, got {n}")
    nodes = np.linspace(r_inner, r_end, n + 1)
    return _build_grid(nodes, "sphere", k, d, True, n_gauss)


def make_exterior_grid(d: int, r_max: float, n: int, r_inner: float = 1.0, n_gauss: int = DEFAULT_GAUSS_POINTS) -> RadialGrid:
    """Uniform grid on [r_inner, r_max] with the r^{d-1} weight."""
    if not r_max > r_inner:
        raise ConfigurationError(f"R_max={r_max} must exceed r_inner={r_inner}")
    n = _even(n)
    if n < 4:
        raise ConfigurationError(f"Grid needs at least 4 cells, got {n}")
    nodes = np.linspace(r_inner, r_max, n + 1)
    return _build_grid(nodes, "exterior", None, d, False, n_gauss)


def closed_form_volume(grid: RadialGrid) -> float:
    """Exact integral of W over the grid interval."""
    if grid.kind == "sphere":
        return sphere_volume_integral(grid.k, grid.d, grid.r_inner)
    return (grid.r_end ** grid.d - grid.r_inner ** grid.d) / grid.d


def volume_check(grid: RadialGrid) -> float:
    """Relative error of the quadrature volume against the closed form."""
    exact = closed_form_volume(grid)
    return abs(float(np.sum(grid.quad_weights)) - exact) / abs(exact)


def stiffness_matrix(grid: RadialGrid) -> sps.csr_matrix:
    """
    Symmetric matrix K with (K u)_i ~ -integral over cell i of (W u')'.

    Rows couple nearest neighbours through the face weights W(r_{i+1/2}).
    """
    n = grid.n
    diff = sps.diags([-np.ones(n), np.ones(n)], [0, 1], shape=(n, n + 1), format="csr")
    face = sps.diags(grid.edge_weights / grid.h)
    return (diff.T @ face @ diff).tocsr()


def dirichlet_energy(grid: RadialGrid, values: np.ndarray) -> float:
    """Discrete integral of W u'^2 (face differences)."""
    du = np.diff(values) / grid.h
    return float(np.sum(grid.edge_weights * du ** 2) * grid.h)


def mass_integral(grid: RadialGrid, values: np.ndarray) -> float:
    """Discrete integral of W f using the control volumes."""
    return float(np.dot(grid.cell_volumes, values))


def k_norm(u: np.ndarray, grid: RadialGrid, d: int) -> float:
    """
    Weighted H^1 norm: sqrt of the integral of W [(u')^2 + u^2].

    Equals the H^1 norm of the radial function divided by sqrt(omega_{d-1}).
    """
    if grid.d != d:
        raise GridError(f"Grid built for d={grid.d}, norm requested for d={d}")
    values = ensure_matches_grid(u, len(grid.nodes))
    return math.sqrt(dirichlet_energy(grid, values) + mass_integral(grid, values ** 2))


def face_derivative(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    """Derivative at the nodes: central inside, one-sided second order at the ends."""
    return np.gradient(values, grid.h, edge_order=2)
