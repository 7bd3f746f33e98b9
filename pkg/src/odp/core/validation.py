"""Validation helpers for sampled profiles and parameter lists."""

import numpy as np
from typing import Sequence
from odp.core.errors import GridError, ConfigurationError


def ensure_matches_grid(values: np.ndarray, n_nodes: int, name: str = "profile") -> np.ndarray:
    """
    Check that a sampled profile has one value per grid node.

    Args:
        values: Sampled values
        n_nodes: Number of grid nodes
        name: Label used in the error message

    Returns:
        The values as a float array
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != n_nodes:
        raise GridError(f"{name} has shape {arr.shape}, grid has {n_nodes} nodes")
    if not np.all(np.isfinite(arr)):
        raise GridError(f"{name} contains non-finite values")
    return arr


def ensure_strictly_increasing(nodes: np.ndarray, name: str = "nodes") -> None:
    """Raise GridError unless nodes are strictly increasing."""
    if np.any(np.diff(nodes) <= 0):
        raise GridError(f"{name} must be strictly increasing")


def ensure_decreasing(values: Sequence[float], name: str) -> None:
    """Raise ConfigurationError unless values are strictly decreasing."""
    arr = np.asarray(values, dtype=float)
    if arr.size > 1 and np.any(np.diff(arr) >= 0):
        raise ConfigurationError(f"{name} must be strictly decreasing, got {list(arr)}")


def parse_float_list(text: str) -> list:
    """Parse a comma separated list of floats ("1e-3,2e-3")."""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise ConfigurationError(f"Cannot parse number list: {text!r}")
