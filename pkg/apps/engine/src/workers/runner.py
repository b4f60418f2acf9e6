"""Fan-out of independent table rows to a process pool.

Results always come back in input order, whatever order the workers finish in.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def run_rows(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Apply fn to every item; fn must be a module-level function when workers > 1."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    n = min(workers, len(items))
    logger.info("running %d rows on %d worker processes", len(items), n)
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
