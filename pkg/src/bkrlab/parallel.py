"""Ordered process-pool map; results never depend on the worker count."""

from __future__ import annotations

import contextlib
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator


class _Serial:
    def map(self, fn: Callable, items: Iterable) -> Iterator:
        return map(fn, items)


@contextlib.contextmanager
def worker_pool(workers: int):
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1:
        yield _Serial()
        return
    with ProcessPoolExecutor(max_workers=workers) as ex:
        yield ex


def first_hit(pool, fn: Callable, total: int, make_task: Callable[[int, int], object],
              block: int, workers: int):
    """Scan [0, total) in fixed blocks; return fn's first non-None result.

    ``fn(make_task(lo, hi))`` must return a hit for the lowest matching index
    in [lo, hi) or None. Blocks are dispatched in waves of `workers` and
    inspected in index order, so the answer is the global first hit.
    """
    lo = 0
    while lo < total:
        hi = min(total, lo + block * workers)
        tasks = [make_task(a, min(a + block, hi)) for a in range(lo, hi, block)]
        for res in pool.map(fn, tasks):
            if res is not None:
                return res
        lo = hi
    return None
