"""Ordered parallel map over pure per-item work."""

from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """
    Apply func to every item and return the results in input order.

    Threads suffice because the heavy lifting happens in numpy/scipy calls that
    release the GIL. With threads <= 1 the map runs inline, so results never
    depend on the thread count.
    """
    work = list(items)
    if threads <= 1 or len(work) <= 1:
        return [func(item) for item in work]
    with ThreadPoolExecutor(max_workers=min(threads, len(work))) as pool:
        return list(pool.map(func, work))
