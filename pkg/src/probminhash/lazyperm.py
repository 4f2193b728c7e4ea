"""Sampling without replacement from {1,..,m} with O(1) reset.

Versioned lazy Fisher-Yates: array entries whose version differs from the
current epoch counter are semantically equal to their initial value, so a new
permutation costs one counter increment instead of an O(m) re-initialization.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as _k
from .errors import InvalidParamsError
from .rng import RandomStream


class LazyPermutation:
    """Emits a uniform random permutation of {1,..,m} one label at a time."""

    __slots__ = ("m", "_perm", "_vers", "_counter", "_emitted")

    def __init__(self, m: int):
        if m < 1:
            raise InvalidParamsError("permutation size must be >= 1")
        self.m = m
        self._perm = np.zeros(m + 1, np.int64)
        # sentinel epoch: no slot matches the counter, so every entry reads
        # as its initial value before the first write
        self._vers = np.full(m + 1, 0xFFFFFFFFFFFFFFFF, np.uint64)
        self._counter = np.uint64(0)
        self._emitted = 0

    def reset(self) -> None:
        """Start a new epoch; O(1), no array writes."""
        self._counter = self._counter + np.uint64(1)
        self._emitted = 0

    def next(self, stream: RandomStream) -> int:
        """Next element of the current epoch's permutation (1-based label)."""
        assert self._emitted < self.m, "permutation exhausted for this epoch"
        self._emitted += 1
        return int(
            _k._perm_next(
                stream._st, self._perm, self._vers, self._counter,
                self._emitted, self.m,
            )
        )

    @property
    def emitted(self) -> int:
        return self._emitted


def perm_new(m: int) -> LazyPermutation:
    return LazyPermutation(m)
