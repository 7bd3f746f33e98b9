"""Logging for odp runs: console text plus a rotating JSON log."""

import logging
import logging.config
from pathlib import Path
from typing import Any, Dict, Optional, Union

from odp.core.config import REPO_ROOT, get_config

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _route_log_files(log_config: Dict[str, Any], log_dir: Path) -> None:
    for handler in log_config.get("handlers", {}).values():
        if "filename" not in handler:
            continue
        filename = Path(handler["filename"])
        if not filename.is_absolute():
            filename = log_dir / filename.name
        filename.parent.mkdir(parents=True, exist_ok=True)
        handler["filename"] = str(filename)


def setup_logging(log_dir: Optional[Union[str, Path]] = None, level: Optional[str] = None) -> None:
    """
    Configure logging from logging.yaml.

    Args:
        log_dir: Directory for file handlers (default: app.logs_dir under the repo root)
        level: Level for the root and "odp" loggers (default: app.log_level, i.e. LOG_LEVEL)
    """
    config = get_config()
    app = config.get("app", {})
    log_config = dict(config.get("logging_config") or {})
    level = (level or app.get("log_level") or "INFO").upper()

    if log_config:
        log_config["handlers"] = {name: dict(h) for name, h in log_config.get("handlers", {}).items()}
        _route_log_files(log_config, Path(log_dir) if log_dir else REPO_ROOT / app.get("logs_dir", "data/logs"))
        logging.config.dictConfig(log_config)
    else:
        logging.basicConfig(level=level, format=TEXT_FORMAT)

    logging.getLogger().setLevel(level)
    logging.getLogger("odp").setLevel(level)
