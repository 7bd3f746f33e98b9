"""Mode-decomposed linearized Dirichlet operator around the sphere profile."""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from odp.core.config import solver_section
from odp.core.errors import ConfigurationError, SpectrumError
from odp.geometry.grid import k_norm, mass_integral
from odp.geometry.symmetry import SymmetryGroup, validate_group
from odp.numerics.eigen import dense_smallest_eigenpairs, smallest_eigenpairs
from odp.numerics.radial_operator import DirichletModeOperator, build_mode_operator
from odp.radial.solver import ProfileCache, RadialProfile

logger = logging.getLogger(__name__)


@dataclass
class PrincipalPair:
    """Negative principal eigenvalue tau with its radial eigenfunction z."""

    tau: float
    z: np.ndarray
    l2_norm: float
    h1_norm: float
    second_eig: float

    @property
    def morse_index(self) -> int:
        return int(self.tau < 0) + int(self.second_eig < 0)


def mode_operator(u: RadialProfile, degree: int) -> DirichletModeOperator:
    return build_mode_operator(u.grid, u.values, u.params.p, u.lam, degree)


def _eig_tol() -> float:
    return float(solver_section("eigen").get("tol", 1e-13))


def principal_dirichlet_pair(u: RadialProfile) -> PrincipalPair:
    """
    Smallest two eigenvalues of the l = 0 operator and the principal eigenfunction.

    z is positive, vanishes at r = 1 and has unit weighted H^1 norm.

    Raises:
        SpectrumError: if tau >= 0
    """
    op = mode_operator(u, 0)
    values, vectors = smallest_eigenpairs(op.matrix, op.mass, 2, _eig_tol())
    tau = float(values[0])
    if tau >= 0.0:
        raise SpectrumError(f"Principal Dirichlet eigenvalue {tau:.4g} >= 0 at k={u.k:g}, lambda={u.lam:g}")
    z = np.zeros(u.grid.n + 1)
    z[op.interior] = vectors[:, 0]
    h1 = k_norm(z, u.grid, u.grid.d)
    z /= h1
    l2 = float(np.sqrt(mass_integral(u.grid, z ** 2)))
    return PrincipalPair(tau=tau, z=z, l2_norm=l2, h1_norm=1.0, second_eig=float(values[1]))


def dirichlet_form_identity(u: RadialProfile) -> Tuple[float, float]:
    """
    Q^D(u) against -(p-1) int u^{p+1} S^{d-1}.

    Returns:
        (Q^D(u), relative mismatch)
    """
    op = mode_operator(u, 0)
    q = float(u.values @ op.full.dot(u.values))
    target = -(u.params.p - 1.0) * mass_integral(u.grid, np.maximum(u.values, 0.0) ** (u.params.p + 1.0))
    return q, abs(q - target) / abs(target)


def mode_eigenvalues(u: RadialProfile, degree: int, count: int = 2) -> np.ndarray:
    op = mode_operator(u, degree)
    values, _ = smallest_eigenpairs(op.matrix, op.mass, count, _eig_tol())
    return values


def mode_spectrum_table(u: RadialProfile, degrees: Iterable[int]) -> pd.DataFrame:
    """Lowest two Dirichlet eigenvalues per degree (columns l, mu, eig1, eig2)."""
    rows = []
    for degree in degrees:
        op = mode_operator(u, degree)
        values, _ = smallest_eigenpairs(op.matrix, op.mass, 2, _eig_tol())
        rows.append({"l": degree, "mu": op.mu, "eig1": float(values[0]), "eig2": float(values[1])})
    return pd.DataFrame(rows, columns=["l", "mu", "eig1", "eig2"])


def dense_oracle(op: DirichletModeOperator, count: int = 2) -> np.ndarray:
    """Smallest eigenvalues of the dense pencil, for small grids only."""
    dense_max = int(solver_section("eigen").get("dense_max_n", 800))
    if op.matrix.shape[0] > dense_max:
        raise ConfigurationError(f"Dense oracle limited to {dense_max} unknowns, operator has {op.matrix.shape[0]}")
    values, _ = dense_smallest_eigenpairs(op.matrix, op.mass, count)
    return values


def margin_row(u: RadialProfile, group: SymmetryGroup) -> dict:
    """Admissible-mode eigenvalues at one lambda, with l = 1 as a diagnostic."""
    row = {"lambda": u.lam, "second_radial": float(mode_eigenvalues(u, 0, 2)[1])}
    for degree in group.degrees:
        row[f"eig_{degree}"] = float(mode_eigenvalues(u, degree, 1)[0])
    row["margin"] = min(v for key, v in row.items() if key != "lambda")
    row["dirichlet_l1"] = float(mode_eigenvalues(u, 1, 1)[0])
    return row


def margin_table(cache: ProfileCache, group: SymmetryGroup, lambdas: Sequence[float]) -> pd.DataFrame:
    group = validate_group(group)
    return pd.DataFrame([margin_row(cache.get(lam), group) for lam in lambdas])


def dirichlet_margin(
    cache: ProfileCache,
    group: SymmetryGroup,
    lambda_window: Tuple[float, float],
    n_lambda: int = 5,
    table: Optional[list] = None,
) -> float:
    """
    Smallest relevant Dirichlet eigenvalue over the window and the admissible modes.

    The l = 0 entry is the second eigenvalue; l >= 1 entries are the first.

    Args:
        cache: Sphere profiles at the working k
        group: Symmetry group satisfying (G)
        lambda_window: (lambda0, lambda1)
        n_lambda: Samples across the window
        table: When given, receives the per-lambda rows

    Raises:
        SpectrumError: if the margin is not positive
    """
    lam0, lam1 = lambda_window
    frame = margin_table(cache, group, np.linspace(lam0, lam1, n_lambda))
    if table is not None:
        table.extend(frame.to_dict("records"))
    margin = float(frame["margin"].min())
    logger.info(f"Dirichlet margin on [{lam0:.5g}, {lam1:.5g}] at k={cache.params_base.k:g}: {margin:.5g}")
    if not margin > 0.0:
        raise SpectrumError(f"Dirichlet margin {margin:.4g} <= 0 on [{lam0:.5g}, {lam1:.5g}]: reselect the window")
    return margin
