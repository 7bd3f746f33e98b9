"""Linearized Dirichlet-to-Neumann operator: mode solves, forms and reports."""

from odp.dtn.modes import (
    ModeSpectrumEntry,
    solve_mode_bvp,
    dtn_eigenvalue,
    auxiliary_theta,
    steklov_fallback,
    steklov_schur,
    mode_entry,
)
from odp.dtn.forms import quadratic_form_Q, quadratic_form_field, trace_inequality
from odp.dtn.report import DtnReport, dtn_report, orthogonality_check, green_boundary_residual

__all__ = [
    "ModeSpectrumEntry",
    "solve_mode_bvp",
    "dtn_eigenvalue",
    "auxiliary_theta",
    "steklov_fallback",
    "steklov_schur",
    "mode_entry",
    "quadratic_form_Q",
    "quadratic_form_field",
    "trace_inequality",
    "DtnReport",
    "dtn_report",
    "orthogonality_check",
    "green_boundary_residual",
]
