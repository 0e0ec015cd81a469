# ============================================================================
# GRID WORKER
# ============================================================================

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

Item = TypeVar("Item")
Result = TypeVar("Result")

ProgressCallback = Callable[[int, str], None]  # progress percent, status message


class GridWorker:
    """Evaluates a function over a grid of points, keeping results in input order"""

    def __init__(self, max_workers: Optional[int] = None, progress: Optional[ProgressCallback] = None,
                 label: str = "grid"):
        self.max_workers = max_workers
        self.progress = progress
        self.label = label

    def _report(self, done: int, total: int):
        if self.progress is not None and total:
            self.progress(int(100 * done / total), f"{self.label}: {done}/{total}")

    def map(self, fn: Callable[[Item], Result], items: Iterable[Item]) -> List[Result]:
        """fn over every item; serial when max_workers is 1, threaded otherwise"""
        items = list(items)
        total = len(items)
        if self.max_workers == 1 or total <= 1:
            results = []
            for n, item in enumerate(items, start=1):
                results.append(fn(item))
                self._report(n, total)
            return results

        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            futures = [pool.submit(fn, item) for item in items]
            results = []
            for n, future in enumerate(futures, start=1):
                results.append(future.result())
                self._report(n, total)
        logger.debug("%s: %d points evaluated", self.label, total)
        return results
