"""Ordered fan-out helpers.

Work is always split into a fixed list of chunks that does not depend on the
worker count; results come back in chunk order, so reductions are identical
for any number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV = "MULTDYCK_WORKERS"


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            value = 0
        if value >= 1:
            return value
    return os.cpu_count() or 1


def ordered_map(
    fn: Callable[[T], R],
    items: Sequence[T] | Iterable[T],
    workers: int = 1,
    processes: bool = False,
) -> list[R]:
    """``[fn(x) for x in items]``, optionally spread over a pool.

    Threads suit numpy-bound work (ufuncs release the GIL); pure-Python
    loops need ``processes=True`` and a picklable, module-level ``fn``.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    n = min(workers, len(items))
    pool_cls = ProcessPoolExecutor if processes else ThreadPoolExecutor
    with pool_cls(max_workers=n) as pool:
        return list(pool.map(fn, items))


def chunk_ranges(total: int, size: int) -> list[tuple[int, int]]:
    """Contiguous half-open ranges covering ``[0, total)``."""
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]
