"""CSV tables with a reproducibility header and JSON reports with a meta block."""

import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd
import yaml

from odp import __version__
from odp.cli.run_config import RunConfig
from odp.core.config import get_config, solver_section

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# "


def build_meta(config: RunConfig, command: str, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Version, parameters, grid sizes and tolerances behind one output."""
    newton = solver_section("newton")
    annulus = solver_section("annulus")
    meta = {
        "version": __version__,
        "command": command,
        "d": config.d,
        "p": config.p,
        "k": config.k,
        "lambda": config.lam,
        "group": config.group,
        "n_r": config.n_r,
        "n_theta": config.n_theta,
        "n_exterior": config.n_exterior,
        "residual_tol": newton.get("residual_tol"),
        "accept_tol": newton.get("accept_tol"),
        "branch_tol": annulus.get("branch_tol"),
        "gauss_points": solver_section("grid").get("gauss_points"),
    }
    if extra:
        meta.update(extra)
    return meta


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, Path):
        return str(value)
    return value


def _json_default(value: Any) -> Any:
    converted = _plain(value)
    if converted is value:
        raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")
    return converted


def default_output(command: str, suffix: str) -> Path:
    runs_dir = Path(get_config().get("app", {}).get("runs_dir", "data/runs"))
    return runs_dir / f"{command.replace('-', '_')}{suffix}"


def write_table(df: pd.DataFrame, path: str, meta: Dict[str, Any]) -> str:
    """
    Write a CSV preceded by one "# key=value" line per meta entry.

    Args:
        df: Table
        path: Output path
        meta: Flat mapping (values written in YAML flow syntax)

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for key, value in meta.items():
            text = yaml.safe_dump(_plain(value), default_flow_style=True).strip()
            if text.endswith("..."):
                text = text[:-3].strip()
            f.write(f"{HEADER_PREFIX}{key}={text}\n")
        df.to_csv(f, index=False)
    logger.info(f"Wrote {len(df)} rows to {path}")
    return str(path)


def read_table(path: str) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """Inverse of write_table."""
    meta: Dict[str, Any] = {}
    body = []
    with open(path, "r") as f:
        for line in f:
            if line.startswith(HEADER_PREFIX) and not body:
                key, _, text = line[len(HEADER_PREFIX):].rstrip("\n").partition("=")
                meta[key] = yaml.safe_load(text)
            else:
                body.append(line)
    df = pd.read_csv(io.StringIO("".join(body))) if body else pd.DataFrame()
    return df, meta


def write_report(data: Dict[str, Any], path: str, meta: Dict[str, Any]) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump({"meta": meta, **data}, f, indent=2, default=_json_default)
    logger.info(f"Wrote report to {path}")
    return str(path)


def read_report(path: str) -> Dict[str, Any]:
    with open(path, "r") as f:
        return json.load(f)
