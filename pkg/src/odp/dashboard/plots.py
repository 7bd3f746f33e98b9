"""HTML figures with Plotly: profiles, lambda scans and branch diagrams."""

import logging
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from odp.annulus2d.field import PerturbationField
from odp.annulus2d.metric import domain_outline

logger = logging.getLogger(__name__)


def _write(fig: go.Figure, output_path: str, title: str, summary: Optional[Dict] = None) -> str:
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)

    summary_html = ""
    if summary:
        summary_html = "<table border='1'><tr><th>Quantity</th><th>Value</th></tr>"
        for key, value in summary.items():
            if value is None:
                continue
            text = f"{value:.10g}" if isinstance(value, (float, np.floating)) else str(value)
            summary_html += f"<tr><td>{key}</td><td>{text}</td></tr>"
        summary_html += "</table>"

    html_content = f"""
    <!DOCTYPE html>
    <html>
    <head>
        <title>{title}</title>
    </head>
    <body>
        <h1>{title}</h1>
        {summary_html}
        {fig.to_html(include_plotlyjs='cdn')}
    </body>
    </html>
    """
    with open(output_path, "w") as f:
        f.write(html_content)
    logger.info(f"Generated plot: {output_path}")
    return str(output_path)


def plot_profile(profile: pd.DataFrame, output_path: str, title: str = "Radial profile", summary: Optional[Dict] = None) -> str:
    """u and u' against r (columns r, u and optionally du)."""
    fig = make_subplots(rows=2, cols=1, subplot_titles=("u(r)", "u'(r)"), vertical_spacing=0.1)
    fig.add_trace(go.Scatter(x=profile["r"], y=profile["u"], mode="lines", name="u", line=dict(color="blue")), row=1, col=1)
    if "du" in profile.columns:
        fig.add_trace(go.Scatter(x=profile["r"], y=profile["du"], mode="lines", name="u'", line=dict(color="red")), row=2, col=1)
    fig.update_layout(height=800, title_text=title, showlegend=True)
    fig.update_xaxes(title_text="r", row=2, col=1)
    return _write(fig, output_path, title, summary)


def plot_lambda_scan(scan: pd.DataFrame, output_path: str, thresholds: Optional[Dict[str, float]] = None) -> str:
    """DtN values and Dirichlet margin of the limit problem along lambda."""
    fig = make_subplots(rows=2, cols=1, subplot_titles=("DtN eigenvalues", "Dirichlet margin"), vertical_spacing=0.1)
    for column in [c for c in scan.columns if c.startswith("h_tilde_")]:
        fig.add_trace(go.Scatter(x=scan["lambda"], y=scan[column], mode="lines+markers", name=column), row=1, col=1)
    for column in [c for c in ("margin", "second_eig", "dirichlet_l1") if c in scan.columns]:
        fig.add_trace(go.Scatter(x=scan["lambda"], y=scan[column], mode="lines+markers", name=column), row=2, col=1)
    for name, value in (thresholds or {}).items():
        if value is not None:
            fig.add_vline(x=value, line_dash="dash", annotation_text=name)
    fig.update_xaxes(type="log", title_text="lambda")
    fig.update_layout(height=900, title_text="Limit problem scan", showlegend=True)
    return _write(fig, output_path, "Limit problem scan", thresholds)


def plot_branch(branch: pd.DataFrame, k: float, n: int, output_path: str, lambda_star: Optional[float] = None) -> str:
    """Bifurcation diagram (a against lambda) with the domain outlines of every branch point."""
    fig = make_subplots(rows=1, cols=2, subplot_titles=("Branch", "Domains B_{1+v}"))
    fig.add_trace(
        go.Scatter(x=branch["lambda"], y=branch["amplitude"], mode="lines+markers", name="a(lambda)", line=dict(color="blue")),
        row=1,
        col=1,
    )
    if lambda_star is not None:
        fig.add_trace(
            go.Scatter(x=[lambda_star], y=[0.0], mode="markers", name="lambda*", marker=dict(color="red", size=10)),
            row=1,
            col=1,
        )
    columns: List[str] = [c for c in branch.columns if c.startswith("a_")]
    for _, row in branch.iterrows():
        v = PerturbationField(tuple(float(row[c]) for c in columns), n)
        outline = domain_outline(v, k)
        fig.add_trace(
            go.Scatter(x=outline["x"], y=outline["y"], mode="lines", name=f"a={row['amplitude']:g}"),
            row=1,
            col=2,
        )
    fig.update_xaxes(title_text="lambda", row=1, col=1)
    fig.update_yaxes(title_text="a", row=1, col=1)
    fig.update_yaxes(scaleanchor="x2", scaleratio=1, row=1, col=2)
    fig.update_layout(height=600, title_text=f"Branch at k={k:g}, n={n}", showlegend=True)
    summary = {"lambda_star": lambda_star, "rate": branch.attrs.get("rate")}
    return _write(fig, output_path, f"Branch at k={k:g}, n={n}", summary)
