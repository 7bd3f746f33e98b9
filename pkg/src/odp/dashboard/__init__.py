"""Plots and reports."""

from odp.dashboard.plots import plot_profile, plot_lambda_scan, plot_branch

__all__ = ["plot_profile", "plot_lambda_scan", "plot_branch"]
