"""Deterministic worker-pool helpers.

Work items are always reduced in submission order, so results are bitwise
independent of the pool size.  BLOB_THREADS provides the default when no
explicit thread count is given.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(explicit=None) -> int:
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("BLOB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def deterministic_map(fn, items, threads=None):
    """map() over items, preserving order regardless of worker count."""
    items = list(items)
    n = resolve_threads(threads)
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
