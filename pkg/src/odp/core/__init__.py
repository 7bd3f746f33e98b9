"""Core utilities and infrastructure."""

from odp.core.config import load_config, get_config, reload_config
from odp.core.errors import (
    OdpError,
    ConfigurationError,
    GridError,
    SolverError,
    ConvergenceError,
    TrivialSolutionError,
)
from odp.core.logging import setup_logging
from odp.core.parallel import resolve_n_jobs, map_parallel
from odp.core.store import LambdaStore

__all__ = [
    "load_config",
    "get_config",
    "reload_config",
    "OdpError",
    "ConfigurationError",
    "GridError",
    "SolverError",
    "ConvergenceError",
    "TrivialSolutionError",
    "setup_logging",
    "resolve_n_jobs",
    "map_parallel",
    "LambdaStore",
]
