"""Smallest eigenpairs of symmetric pencils (A, diag(m))."""

import logging
from typing import Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sps
from scipy.sparse.linalg import eigsh, ArpackError

from odp.core.errors import SpectrumError

logger = logging.getLogger(__name__)


def gershgorin_lower_bound(A: sps.spmatrix, mass: np.ndarray) -> float:
    """Lower bound of the spectrum of the pencil (A, diag(mass))."""
    A = sps.csr_matrix(A)
    diag = A.diagonal()
    off = np.asarray(abs(A).sum(axis=1)).ravel() - np.abs(diag)
    return float(np.min((diag - off) / mass))


def _normalize(vectors: np.ndarray, mass: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        v = out[:, j]
        v /= np.sqrt(np.dot(mass * v, v))
        # Sign fixed by the largest entry
        if v[np.argmax(np.abs(v))] < 0:
            v *= -1.0
    return out


def smallest_eigenpairs(A: sps.spmatrix, mass: np.ndarray, count: int = 2, tol: float = 1e-13) -> Tuple[np.ndarray, np.ndarray]:
    """
    Smallest eigenpairs of A x = t diag(mass) x by shift-invert Lanczos.

    The shift sits below the Gershgorin bound, so the shifted matrix is
    definite and the largest shift-inverted eigenvalues are the smallest t.

    Args:
        A: Sparse symmetric matrix
        mass: Positive diagonal of the mass matrix
        count: Number of eigenpairs
        tol: ARPACK tolerance

    Returns:
        (values ascending, mass-orthonormal vectors as columns)
    """
    n = A.shape[0]
    if count >= n - 1:
        return dense_smallest_eigenpairs(A, mass, count)
    lower = gershgorin_lower_bound(A, mass)
    sigma = lower - 0.1 * max(1.0, abs(lower))
    try:
        values, vectors = eigsh(
            sps.csc_matrix(A),
            k=count,
            M=sps.diags(mass, format="csc"),
            sigma=sigma,
            which="LM",
            tol=tol,
            maxiter=max(1000, 20 * n),
        )
    except ArpackError as e:
        raise SpectrumError(f"Shift-invert eigensolve failed: {e}") from e
    order = np.argsort(values)
    return values[order], _normalize(vectors[:, order], mass)


def dense_smallest_eigenpairs(A: sps.spmatrix, mass: np.ndarray, count: int = 2) -> Tuple[np.ndarray, np.ndarray]:
    """Dense oracle: scipy.linalg.eigh on the full pencil."""
    dense = A.toarray() if sps.issparse(A) else np.asarray(A)
    try:
        values, vectors = scipy.linalg.eigh(dense, np.diag(mass), subset_by_index=[0, count - 1])
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SpectrumError(f"Dense eigensolve failed: {e}") from e
    return values, _normalize(vectors, mass)
