"""Optional thread fan-out for independent per-component work.

``HCS_FORGE_THREADS`` caps the worker count; unset, 0 or 1 means sequential.
Results are always returned in input order.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("HCS_FORGE_THREADS", "0").strip()
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


def pmap(fn, items):
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
