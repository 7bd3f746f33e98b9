"""Perturbed domains in S^2(k): pullback solves, the nonlinear DtN map and the branch."""

from odp.annulus2d.field import AnnulusGrid, PerturbationField, make_annulus_grid
from odp.annulus2d.metric import MetricField, pullback_metric, domain_outline
from odp.annulus2d.solver import AnnulusSolution, PulledBackOperator, assemble_operator, solve_perturbed
from odp.annulus2d.dtn_map import NeumannData, evaluate_dtn, nonlinear_dtn_F, jacobian_check
from odp.annulus2d.branch import BranchPoint, trace_branch, branch_rate

__all__ = [
    "AnnulusGrid",
    "PerturbationField",
    "make_annulus_grid",
    "MetricField",
    "pullback_metric",
    "domain_outline",
    "AnnulusSolution",
    "PulledBackOperator",
    "assemble_operator",
    "solve_perturbed",
    "NeumannData",
    "evaluate_dtn",
    "nonlinear_dtn_F",
    "jacobian_check",
    "BranchPoint",
    "trace_branch",
    "branch_rate",
]
