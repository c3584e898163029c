"""Thread pool helper; KINKERNEL_THREADS sets the worker count."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence


def worker_count(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get("KINKERNEL_THREADS", "")
        threads = int(env) if env.strip() else 1
    return max(1, int(threads))


def parallel_map(fn: Callable, items: Sequence, threads: Optional[int] = None) -> list:
    """``[fn(i) for i in items]`` in input order, optionally on a thread pool."""
    n = worker_count(threads)
    if n == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
