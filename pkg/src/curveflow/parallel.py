"""Order-preserving parallel map capped by ``CURVEFLOW_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "CURVEFLOW_THREADS"


def worker_count() -> int:
    """Worker cap from the environment; 0 or unset means one per CPU."""
    raw = os.environ.get(ENV_VAR, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{ENV_VAR} must be >= 0")
    return n or (os.cpu_count() or 1)


def pmap(fn, items):
    """``[fn(a) for a in items]``, evaluated on a thread pool when that helps."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(a) for a in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
