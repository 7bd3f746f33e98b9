"""lambda*(k), the parity certificate and sweeps over k."""

from odp.bifurcate.lambda_star import (
    BifurcationCertificate,
    find_lambda_star,
    parity_certificate,
    parity_diagnostics,
)
from odp.bifurcate.sweep import sweep, SWEEP_COLUMNS

__all__ = [
    "BifurcationCertificate",
    "find_lambda_star",
    "parity_certificate",
    "parity_diagnostics",
    "sweep",
    "SWEEP_COLUMNS",
]
