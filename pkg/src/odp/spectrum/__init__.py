"""Linearized Dirichlet spectrum on S^d(k) minus B_1, mode by mode."""

from odp.numerics.radial_operator import DirichletModeOperator
from odp.spectrum.dirichlet import (
    PrincipalPair,
    principal_dirichlet_pair,
    dirichlet_margin,
    dirichlet_form_identity,
    mode_operator,
    mode_spectrum_table,
    dense_oracle,
)

__all__ = [
    "DirichletModeOperator",
    "PrincipalPair",
    "principal_dirichlet_pair",
    "dirichlet_margin",
    "dirichlet_form_identity",
    "mode_operator",
    "mode_spectrum_table",
    "dense_oracle",
]
