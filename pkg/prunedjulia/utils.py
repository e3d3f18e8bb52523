"""
Shared helpers.

Ordered parallel map, interval parsing and complex-point conversions.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from prunedjulia.config import settings
from prunedjulia.exceptions import IntervalConstraint, ValidationFailure

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Map a function over items, optionally on a thread pool.

    Args:
        fn: Function applied to each item
        items: Inputs
        threads: Worker count; defaults to ``settings.threads``

    Returns:
        Results in input order
    """
    workers = settings.threads if threads is None else threads
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def parse_intervals(text: str) -> List[tuple[float, float]]:
    """
    Parse ``"lo,hi;lo,hi"`` into a list of intervals.

    Raises:
        IntervalConstraint: If an entry is malformed or empty
    """
    intervals = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise IntervalConstraint(f"Interval '{chunk}' is not of the form lo,hi")
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise IntervalConstraint(f"Interval '{chunk}' has non-numeric ends")
        if not lo < hi:
            raise IntervalConstraint(f"Interval '{chunk}' is empty")
        intervals.append((lo, hi))
    return intervals


def complex_pairs(points: Sequence[complex]) -> List[List[float]]:
    """Convert complex numbers to ``[re, im]`` pairs."""
    return [[float(np.real(z)), float(np.imag(z))] for z in points]


def chebyshev_grid(cells: int) -> np.ndarray:
    """Nodes -cos(pi*u) on a uniform u-grid, clustered at -1 and 1."""
    return -np.cos(np.pi * np.linspace(0.0, 1.0, cells + 1))


def parse_points(text: str) -> List[complex]:
    """
    Parse ``"re,im;re,im"`` into complex points.

    Raises:
        ValidationFailure: If an entry is malformed
    """
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            re, im = (float(part) for part in chunk.split(","))
        except ValueError:
            raise ValidationFailure(f"Point '{chunk}' is not of the form re,im")
        points.append(complex(re, im))
    return points
