"""Deterministic pairwise summation, optionally spread over worker threads.

The tree always pairs adjacent elements level by level. Blocks handed to
workers are power-of-two sized and aligned, so every block sum is a node of
the same tree and the result does not depend on the number of workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

BLOCK_SIZE = 1024


def pairwise_sum(values: np.ndarray):
    """Sum a 1-D array by repeatedly adding adjacent pairs."""
    a = np.asarray(values)
    if a.ndim != 1:
        raise ValueError("pairwise_sum expects a 1-D array")
    if a.size == 0:
        return a.dtype.type(0)
    while a.size > 1:
        if a.size % 2:
            a = np.concatenate([a, np.zeros(1, dtype=a.dtype)])
        a = a[0::2] + a[1::2]
    return a[0]


def blocked_sum(
    count: int,
    block_terms: Callable[[int, int], np.ndarray],
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
):
    """Pairwise sum of ``count`` terms produced lazily in aligned blocks.

    ``block_terms(start, stop)`` must return the terms with flat indices
    ``start..stop-1``. ``block_size`` must be a power of two.
    """
    if block_size & (block_size - 1):
        raise ValueError("block_size must be a power of two")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    starts = list(range(0, count, block_size))

    def one(start):
        return pairwise_sum(block_terms(start, min(start + block_size, count)))

    if workers == 1 or len(starts) <= 1:
        partial = [one(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(one, starts))
    return pairwise_sum(np.array(partial))
