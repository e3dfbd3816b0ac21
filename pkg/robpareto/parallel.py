"""
Order-preserving map over a capped thread pool.
"""
from concurrent.futures import ThreadPoolExecutor

from .config import thread_count


def ordered_map(fn, items, threads=None):
    items = list(items)
    workers = min(thread_count(threads), max(len(items), 1))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
