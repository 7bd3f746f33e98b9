"""Assembly of the mode-l linearized operator on a radial grid.

For a harmonic degree l with Laplace-Beltrami eigenvalue mu the operator is

    -lam [ (W phi')' / W - mu phi / S^2 ] + c(r) phi,    c = 1 - p (u^+)^{p-1},

with W = S^{d-1} (sphere) or r^{d-1} (exterior), phi = 0 at the inner boundary,
phi(pi/k) = 0 at the pole for l >= 1, the natural (regular) pole row for l = 0,
and the decay closure phi' + phi / sqrt(lam) = 0 at R_max on the exterior.

Everything is assembled on all nodes in conservative form, so the matrix is
symmetric and phi^T A phi is the discrete quadratic form.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import LinearOperator, onenormest, splu

from odp.core.errors import GridError
from odp.geometry.grid import RadialGrid, stiffness_matrix
from odp.geometry.harmonics import sphere_eigen
from odp.geometry.metric import boundary_curvature

logger = logging.getLogger(__name__)


def potential(u: np.ndarray, p: float) -> np.ndarray:
    """c = 1 - p (u^+)^{p-1}."""
    return 1.0 - p * np.maximum(u, 0.0) ** (p - 1.0)


def robin_coefficient(grid: RadialGrid, lam: float) -> float:
    """Boundary term lam W(R_max) / sqrt(lam) of the exterior decay closure."""
    if grid.kind != "exterior":
        return 0.0
    return lam * float(grid.weight(np.array([grid.r_end]))[0]) / math.sqrt(lam)


def base_matrix(grid: RadialGrid, lam: float) -> sps.csr_matrix:
    """lam K plus the decay closure on exterior grids."""
    A = lam * stiffness_matrix(grid)
    robin = robin_coefficient(grid, lam)
    if robin:
        A = A + sps.csr_matrix(([robin], ([grid.n], [grid.n])), shape=A.shape)
    return A.tocsr()


def inverse_square_mass(grid: RadialGrid) -> np.ndarray:
    """Control volumes divided by S^2 (zero at the pole)."""
    s = grid.sphere_factor()
    out = np.zeros_like(s)
    mask = s > 0
    out[mask] = grid.cell_volumes[mask] / s[mask] ** 2
    return out


def inner_curvature(grid: RadialGrid) -> float:
    """(d-1) C/S at the inner boundary; (d-1)/r on the exterior."""
    if grid.kind == "sphere":
        return boundary_curvature(grid.k, grid.d, grid.r_inner)
    return (grid.d - 1) / grid.r_inner


@dataclass
class DirichletModeOperator:
    """Mode-l linearized Dirichlet operator with its mass and boundary data."""

    degree: int
    mu: float
    lam: float
    grid: RadialGrid
    full: sps.csr_matrix
    interior: np.ndarray
    curvature: float
    _lu: Optional[object] = field(default=None, repr=False)

    @property
    def matrix(self) -> sps.csr_matrix:
        """Restriction to the free nodes (the Dirichlet operator)."""
        idx = self.interior
        return self.full[idx][:, idx].tocsr()

    @property
    def mass(self) -> np.ndarray:
        return self.grid.cell_volumes[self.interior]

    def symmetry_error(self) -> float:
        diff = self.full - self.full.T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def _factor(self):
        if self._lu is None:
            self._lu = splu(sps.csc_matrix(self.matrix))
        return self._lu

    def solve_interior(self, rhs: np.ndarray) -> np.ndarray:
        """Solve the Dirichlet system on the free nodes."""
        return self._factor().solve(np.asarray(rhs, dtype=float))

    def condition_estimate(self) -> float:
        """1-norm condition estimate of the Dirichlet matrix."""
        A = self.matrix
        lu = self._factor()
        n = A.shape[0]
        inverse = LinearOperator((n, n), matvec=lu.solve, rmatvec=lu.solve, dtype=float)
        return float(onenormest(A) * onenormest(inverse))

    def solve_boundary(self, value: float = 1.0) -> np.ndarray:
        """
        Solve the homogeneous equation with phi(r_inner) = value.

        Returns:
            phi on all nodes (zero at the pole for l >= 1)
        """
        phi = np.zeros(self.grid.n + 1)
        phi[0] = value
        coupling = self.full[self.interior][:, [0]].toarray().ravel()
        phi[self.interior] = self.solve_interior(-coupling * value)
        return phi

    def boundary_row(self, phi: np.ndarray) -> float:
        """Row-0 residual (A phi)_0 = -lam W(r_inner) phi'(r_inner)."""
        return float(self.full[[0]].dot(phi)[0])

    def boundary_derivative(self, phi: np.ndarray) -> float:
        """Flux-consistent phi'(r_inner) from the half-cell balance."""
        return -self.boundary_row(phi) / (self.lam * self.grid.boundary_measure)

    def interior_residual(self, phi: np.ndarray) -> float:
        """Strong-form sup-norm residual on the free nodes."""
        r = self.full.dot(phi)[self.interior] / self.mass
        return float(np.max(np.abs(r)))

    def quadratic_form(self, phi: np.ndarray) -> float:
        """Q^l(phi) including the boundary curvature term."""
        volume_part = float(phi @ self.full.dot(phi))
        return volume_part - self.lam * self.curvature * self.grid.boundary_measure * phi[0] ** 2


def build_mode_operator(grid: RadialGrid, u: np.ndarray, p: float, lam: float, degree: int) -> DirichletModeOperator:
    """
    Assemble the mode-l operator around the profile u.

    Args:
        grid: Radial grid
        u: Profile samples on the grid
        p: Nonlinearity exponent
        lam: Diffusion parameter
        degree: Harmonic degree l

    Returns:
        DirichletModeOperator
    """
    if len(u) != grid.n + 1:
        raise GridError(f"Profile has {len(u)} samples, grid has {grid.n + 1} nodes")
    mu = sphere_eigen(degree, grid.d)[0]
    diag = grid.cell_volumes * potential(u, p)
    if degree > 0:
        diag = diag + lam * mu * inverse_square_mass(grid)
    A = base_matrix(grid, lam) + sps.diags(diag)

    last = grid.n if (degree == 0 or not grid.pole_flag) else grid.n - 1
    interior = np.arange(1, last + 1)
    return DirichletModeOperator(
        degree=degree,
        mu=mu,
        lam=lam,
        grid=grid,
        full=A.tocsr(),
        interior=interior,
        curvature=inner_curvature(grid),
    )
