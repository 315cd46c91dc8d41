"""
Parallel execution of sweep points.

Points are independent: each one carries its own task and arguments and
derives its random streams from the master seed and its indices, so the
worker count only changes wall-clock time, never the results.
"""

import logging
import sys
from concurrent.futures import Executor, ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from tqdm import tqdm

from ncdp.config import SHOW_PROGRESS, WORKERS
from ncdp.exceptions import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepPoint:
    """One unit of work: ``task(**kwargs)`` for one (series, x) pair."""
    index: int
    series: str
    x: float
    task: Callable[..., Any]
    kwargs: Dict[str, Any] = field(default_factory=dict)

    def run(self) -> Any:
        return self.task(**self.kwargs)


def _run_point(point: SweepPoint) -> Any:
    return point.run()


class TrialExecutor:
    """
    Runs sweep points serially (one worker) or in a process pool, and
    returns their outputs in point-index order.
    """

    def __init__(self, workers: Optional[int] = None, progress: Optional[bool] = None) -> None:
        self.workers = WORKERS if workers is None else workers
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        self.progress = SHOW_PROGRESS if progress is None else progress

    def _bar(self, total: int, desc: str) -> tqdm:
        return tqdm(total=total, desc=desc, unit="pt", file=sys.stderr, disable=not self.progress)

    def run(self, points: Sequence[SweepPoint], desc: str = "sweep") -> List[Any]:
        indices = [p.index for p in points]
        if len(set(indices)) != len(indices):
            raise ParameterError("sweep point indices must be unique")
        outputs: Dict[int, Any] = {}
        with self._bar(len(points), desc) as bar:
            if self.workers == 1 or len(points) <= 1:
                for point in points:
                    outputs[point.index] = point.run()
                    bar.update(1)
            else:
                with self._pool() as pool:
                    futures = {pool.submit(_run_point, point): point.index for point in points}
                    for future in as_completed(futures):
                        outputs[futures[future]] = future.result()
                        bar.update(1)
        logger.debug("executed %d points on %d worker(s)", len(points), self.workers)
        return [outputs[p.index] for p in sorted(points, key=lambda p: p.index)]

    def _pool(self) -> Executor:
        return ProcessPoolExecutor(max_workers=self.workers)
