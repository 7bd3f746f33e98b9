"""Configuration: app settings, solver tolerances and logging, merged from config/*.yaml."""

import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from odp.core.errors import ConfigurationError

REPO_ROOT = Path(__file__).resolve().parents[3]
CONFIG_DIR = REPO_ROOT / "config"

# Top-level keys land in the merged dict; logging.yaml is kept whole for dictConfig.
SETTINGS_FILES = ("app.yaml", "solver.yaml")
LOGGING_FILE = "logging.yaml"


def _read_yaml(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise ConfigurationError(f"Config file not found: {path}")
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path.name} must hold a mapping, got {type(data).__name__}")
    return data


def load_config(config_dir: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """
    Merge app.yaml and solver.yaml, attach logging.yaml and apply env overrides.

    Args:
        config_dir: Directory holding the YAML files (default: config/ at the repo root)

    Returns:
        Merged configuration; logging.yaml sits under "logging_config"
    """
    config_dir = Path(config_dir) if config_dir is not None else CONFIG_DIR
    if not config_dir.is_dir():
        raise ConfigurationError(f"Config directory not found: {config_dir}")

    merged: Dict[str, Any] = {}
    for name in SETTINGS_FILES:
        section = _read_yaml(config_dir / name)
        clash = set(section) & set(merged)
        if clash:
            raise ConfigurationError(f"{name} redefines sections {sorted(clash)}")
        merged.update(section)
    merged["logging_config"] = _read_yaml(config_dir / LOGGING_FILE)

    _apply_env_overrides(merged.setdefault("app", {}))
    return merged


def _apply_env_overrides(app: Dict[str, Any]) -> None:
    """ODP_THREADS, ODP_RUNS_DIR and LOG_LEVEL override the app section."""
    threads = os.getenv("ODP_THREADS")
    if threads:
        try:
            n_jobs = int(threads)
        except ValueError:
            raise ConfigurationError(f"ODP_THREADS must be an integer, got {threads!r}")
        if n_jobs < 1:
            raise ConfigurationError(f"ODP_THREADS must be >= 1, got {n_jobs}")
        app["n_jobs"] = n_jobs

    if os.getenv("ODP_RUNS_DIR"):
        app["runs_dir"] = os.environ["ODP_RUNS_DIR"]
    if os.getenv("LOG_LEVEL"):
        app["log_level"] = os.environ["LOG_LEVEL"].upper()


@lru_cache(maxsize=1)
def get_config() -> Dict[str, Any]:
    """Merged configuration, loaded once per process."""
    return load_config()


def reload_config() -> Dict[str, Any]:
    """Drop the cached configuration (env vars are re-read) and load it again."""
    get_config.cache_clear()
    return get_config()


def solver_section(name: str) -> Dict[str, Any]:
    """Copy of one solver.yaml section, e.g. "newton" or "annulus" (empty if absent)."""
    return dict(get_config().get(name) or {})
