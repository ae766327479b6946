"""Thread fan-out capped by ``TUBETOP_THREADS``; results keep input order."""
import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    try:
        n = int(os.environ.get("TUBETOP_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def map_ordered(fn, items):
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
