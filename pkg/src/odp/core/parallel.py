"""Parallel execution helpers built on joblib."""

import logging
from typing import Any, Callable, Iterable, List, Optional
from joblib import Parallel, delayed

from odp.core.config import get_config

logger = logging.getLogger(__name__)


def resolve_n_jobs(requested: Optional[int] = None) -> int:
    """
    Worker count for joblib, capped by ODP_THREADS / app.n_jobs.

    Args:
        requested: Explicit request (None uses the configured value)

    Returns:
        Number of workers (>= 1)
    """
    cap = int(get_config().get("app", {}).get("n_jobs", 1) or 1)
    if requested is None:
        return max(1, cap)
    return max(1, min(int(requested), cap))


def map_parallel(func: Callable[..., Any], items: Iterable[Any], n_jobs: Optional[int] = None) -> List[Any]:
    """Apply func to every item, preserving input order."""
    items = list(items)
    jobs = resolve_n_jobs(n_jobs)
    if jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.info(f"Running {len(items)} tasks on {jobs} workers")
    return Parallel(n_jobs=jobs)(delayed(func)(item) for item in items)
