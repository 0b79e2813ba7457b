"""Bounded thread-pool mapping for per-image batch work.

The FPFORGE_THREADS environment variable caps worker count. Results are
always returned in input order, so callers stay deterministic regardless
of how many workers actually run.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ValidationError


def worker_count(n_items: int | None = None) -> int:
    """Number of worker threads to use, honoring FPFORGE_THREADS."""
    cap = os.environ.get("FPFORGE_THREADS")
    if cap is None:
        workers = os.cpu_count() or 1
    else:
        try:
            workers = int(cap)
        except ValueError as exc:
            raise ValidationError(f"FPFORGE_THREADS must be an integer, got {cap!r}") from exc
        if workers < 1:
            raise ValidationError(f"FPFORGE_THREADS must be >= 1, got {workers}")
    if n_items is not None:
        workers = min(workers, max(1, n_items))
    return workers


def pmap(fn, items):
    """Map `fn` over `items`, possibly in parallel, preserving input order."""
    items = list(items)
    workers = worker_count(len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
