"""Deterministic seeded 64-bit random stream and distribution samplers.

The stream is splitmix64 seeded directly with a 64-bit value (sketchers seed
one stream per input element with the element id).  Random bits are consumed
economically through a bit buffer: a [0,1) double takes exactly 53 bits, a
uniform integer over {0,..,n-1} takes ceil(log2 n) bits per rejection round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .errors import InvalidParamsError


@dataclass(frozen=True)
class TruncExpParams:
    """Precomputed constants for sampling Exp(lam) conditioned on [0,1)."""

    lam: float
    c1: float  # (e^lam - 1) / lam, rectangle fast-path scale
    c2: float  # log(2 / (1 + e^-lam)) / lam, always-accept strip
    c3: float  # (1 - e^-lam) / lam, tangent-at-0 slope

    @classmethod
    def from_rate(cls, lam: float) -> "TruncExpParams":
        if not lam > 0.0:
            raise InvalidParamsError("rate must be positive")
        c1 = math.expm1(lam) / lam
        c2 = math.log(2.0 / (1.0 + math.exp(-lam))) / lam
        c3 = -math.expm1(-lam) / lam
        return cls(lam, c1, c2, c3)

    @property
    def fast_path_probability(self) -> float:
        return 1.0 / self.c1


class RandomStream:
    """Single-owner deterministic random stream.

    Identical seeds yield bit-identical output sequences on every platform.
    """

    __slots__ = ("_st",)

    def __init__(self, seed: int):
        self._st = np.empty(4, np.uint64)
        _k._rng_seed(self._st, np.uint64(seed & 0xFFFFFFFFFFFFFFFF))

    # -- scalar draws (the sketching kernels use the same jitted primitives)

    def next_u64(self) -> int:
        return int(_k._next_u64(self._st))

    def next_uniform01(self) -> float:
        return float(_k._uniform01(self._st))

    def next_uniform_int(self, n: int) -> int:
        if n < 1:
            raise InvalidParamsError("range size must be >= 1")
        return int(_k._uniform_int(self._st, n))

    def next_exp1(self) -> float:
        return float(_k._exp1(self._st))

    def next_trunc_exp(self, p: TruncExpParams) -> float:
        return float(_k._trunc_exp(self._st, p.lam, p.c1, p.c2, p.c3))

    # -- batch draws (bulk statistical tests and the harness)

    def uniform01_batch(self, count: int) -> np.ndarray:
        out = np.empty(count, np.float64)
        _k._fill_uniform01(self._st, out)
        return out

    def uniform_int_batch(self, n: int, count: int) -> np.ndarray:
        if n < 1:
            raise InvalidParamsError("range size must be >= 1")
        out = np.empty(count, np.int64)
        _k._fill_uniform_int(self._st, n, out)
        return out

    def exp1_batch(self, count: int) -> np.ndarray:
        out = np.empty(count, np.float64)
        _k._fill_exp1(self._st, out)
        return out

    def trunc_exp_batch(
        self, p: TruncExpParams, count: int, counters: np.ndarray | None = None
    ) -> np.ndarray:
        """Batch draws; `counters` (int64[8]) accumulates sampler region hits:
        draws, fast path, left strip, tangent-at-0, tangent-at-1, density
        accepts, exp evaluations, rejected rounds."""
        if counters is None:
            counters = np.zeros(8, np.int64)
        out = np.empty(count, np.float64)
        _k._fill_trunc_exp(self._st, p.lam, p.c1, p.c2, p.c3, out, counters)
        return out

    def u64_batch(self, count: int) -> np.ndarray:
        out = np.empty(count, np.uint64)
        _k._fill_u64(self._st, out)
        return out

    # -- bit accounting

    @property
    def words_generated(self) -> int:
        """Number of raw 64-bit words produced so far."""
        return int(self._st[3])

    @property
    def bits_buffered(self) -> int:
        """Unconsumed bits currently held in the buffer."""
        return int(self._st[2])

    @property
    def bits_consumed(self) -> int:
        return 64 * self.words_generated - self.bits_buffered


def new_stream(seed: int) -> RandomStream:
    return RandomStream(seed)
