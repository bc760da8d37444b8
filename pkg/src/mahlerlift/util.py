"""Small shared helpers."""

from concurrent.futures import ThreadPoolExecutor

__all__ = ["parallel_map"]


def parallel_map(fn, items, jobs=1):
    """Ordered map, optionally fanned out over a thread pool.

    Results are collected in input order, so output is identical for any
    jobs value; workers must only read shared state that was fully built
    beforehand.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
