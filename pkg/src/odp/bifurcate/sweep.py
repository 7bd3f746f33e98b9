"""lambda*(k) over a list of curvatures, failures isolated per k."""

import logging
from functools import partial
from typing import Any, Dict, Optional, Sequence

import pandas as pd

from odp.bifurcate.lambda_star import find_lambda_star, parity_certificate
from odp.core.errors import OdpError
from odp.core.parallel import map_parallel
from odp.exterior.window import Window, select_window
from odp.geometry.params import ProblemParams
from odp.geometry.symmetry import SymmetryGroup

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "k",
    "lambda_star",
    "limit_crossing",
    "gap_to_limit",
    "sigma1_below",
    "sigma1_above",
    "index_below",
    "index_above",
    "parity_ok",
    "h_at_star",
    "error",
]


def _sweep_row(
    k: float,
    params_base: ProblemParams,
    group: SymmetryGroup,
    window: Window,
    n_r: Optional[int],
) -> Dict[str, Any]:
    row: Dict[str, Any] = {"k": k, "limit_crossing": window.Lambda_star, "error": None}
    try:
        cert = find_lambda_star(params_base.with_k(k), group, window.as_tuple(), n_r=n_r)
    except OdpError as e:
        logger.warning(f"Sweep failed at k={k:g}: {e}")
        row["error"] = f"{type(e).__name__}: {e}"
        return row
    row.update(
        lambda_star=cert.lambda_star,
        gap_to_limit=cert.lambda_star - window.Lambda_star,
        sigma1_below=cert.sigma1_below,
        sigma1_above=cert.sigma1_above,
        index_below=cert.index_below,
        index_above=cert.index_above,
        parity_ok=parity_certificate(cert),
        h_at_star=cert.h_at_star,
    )
    return row


def sweep(
    k_list: Sequence[float],
    group: SymmetryGroup,
    params_base: ProblemParams,
    window: Optional[Window] = None,
    n_r: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> pd.DataFrame:
    """
    Certificates for every k, one row each in the order of k_list.

    A failing k yields a row with the error tag; the others are unaffected.

    Args:
        k_list: Curvatures
        group: Symmetry group
        params_base: d and p
        window: Working window (selected from the limit problem when omitted)
        n_r: Radial cells per sphere grid
        n_jobs: Worker request, capped by ODP_THREADS

    Returns:
        DataFrame with SWEEP_COLUMNS
    """
    if len(k_list) == 0:
        return pd.DataFrame(columns=SWEEP_COLUMNS)
    window = window or select_window(params_base, group)
    task = partial(_sweep_row, params_base=params_base, group=group, window=window, n_r=n_r)
    rows = map_parallel(task, list(k_list), n_jobs)
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)
