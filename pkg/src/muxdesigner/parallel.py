"""Thread-count policy shared by sweeps and Monte Carlo runs."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "MUXDESIGNER_THREADS"


def thread_count(requested: int | None = None) -> int:
    """Worker count: the request (default: CPU count up to 8), capped by ``MUXDESIGNER_THREADS`` if set."""
    if requested is None:
        requested = min(8, os.cpu_count() or 1)
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"{ENV_THREADS} must be an integer, got {env!r}") from None
        requested = min(requested, cap)
    return max(1, requested)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """``list(map(fn, items))``, possibly on a thread pool; result order never depends on scheduling."""
    items = list(items)
    workers = min(thread_count(threads), len(items)) if items else 1
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
