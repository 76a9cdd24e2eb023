"""Deterministic fan-out of independent tasks over worker processes.

Results always come back in task order, so merged output never depends on
how many workers ran.
"""

from __future__ import annotations

import multiprocessing as mp
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def split_range(start: int, stop: int, chunk: int) -> list[tuple[int, int]]:
    """Fixed-size contiguous slices; boundaries never depend on worker count."""
    return [(a, min(a + chunk, stop)) for a in range(start, stop, chunk)]


def map_ordered(fn: Callable[[T], R], tasks: Sequence[T], workers: int = 1) -> list[R]:
    """``[fn(t) for t in tasks]``, optionally spread over ``workers`` processes."""
    return list(imap_ordered(fn, tasks, workers))


def imap_ordered(fn: Callable[[T], R], tasks: Iterable[T], workers: int = 1) -> Iterator[R]:
    """Lazy ordered map; closing the iterator early cancels queued tasks."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        for t in tasks:
            yield fn(t)
        return
    # fork keeps module-level caches (matching tables) warm in the children
    ex = ProcessPoolExecutor(max_workers=min(workers, len(tasks)), mp_context=mp.get_context("fork"))
    window = 2 * workers
    pending: deque = deque()
    it = iter(tasks)
    try:
        for t in it:
            pending.append(ex.submit(fn, t))
            if len(pending) >= window:
                break
        while pending:
            result = pending.popleft().result()
            nxt = next(it, None)
            if nxt is not None:
                pending.append(ex.submit(fn, nxt))
            yield result
    finally:
        ex.shutdown(wait=True, cancel_futures=True)
