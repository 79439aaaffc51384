import os
from concurrent.futures import ThreadPoolExecutor


def thread_count():
    """Worker cap from ``WINDLINE_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get("WINDLINE_THREADS", "").strip()
    try:
        n = int(raw) if raw else 1
    except ValueError:
        n = 1
    return max(1, n)


def ordered_map(fn, items):
    """``[fn(x) for x in items]``, possibly on threads; order is always preserved."""
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
