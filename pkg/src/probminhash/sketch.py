"""Signature algorithms for weighted and unweighted sets.

Weighted algorithms estimate the probability Jaccard similarity; the
unweighted specializations and baselines (MinHash, SuperMinHash, OPH with
densification) target the conventional Jaccard similarity.  Every sketcher is
a pure function of the input sequence: per element a stream is seeded with
the element id, so repeated calls agree bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .errors import EmptyInputError, InvalidParamsError

UNWEIGHTED_VARIANTS = ("1", "1a", "2", "3", "3a", "4")


@dataclass(frozen=True)
class SketchParams:
    m: int
    mode: str = "weighted"

    def __post_init__(self):
        if self.m < 1:
            raise InvalidParamsError("signature size must be >= 1")
        if self.mode not in ("weighted", "unweighted"):
            raise InvalidParamsError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class SketchStats:
    points_generated: int
    max_buffer_size: int
    tree_node_writes: int

    @classmethod
    def _from_array(cls, a: np.ndarray) -> "SketchStats":
        return cls(int(a[0]), int(a[1]), int(a[2]))


@dataclass(frozen=True)
class Signature:
    components: np.ndarray  # uint64[m], element ids
    m: int

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return self.m == other.m and bool(
            np.array_equal(self.components, other.components))


class WeightedSet:
    """Sequence of (element id, positive weight) pairs.

    Ids are 64-bit integers and unique within the set; weights are strictly
    positive.  `from_arrays(..., validate=False)` skips the checks for bulk
    harness use.
    """

    __slots__ = ("ids", "weights")

    def __init__(self, entries):
        ids = np.array([e for e, _ in entries], np.uint64)
        weights = np.array([w for _, w in entries], np.float64)
        self.ids, self.weights = self._checked(ids, weights)

    @classmethod
    def from_arrays(cls, ids, weights, validate: bool = True) -> "WeightedSet":
        obj = cls.__new__(cls)
        ids = np.ascontiguousarray(ids, np.uint64)
        weights = np.ascontiguousarray(weights, np.float64)
        if validate:
            ids, weights = cls._checked(ids, weights)
        obj.ids, obj.weights = ids, weights
        return obj

    @staticmethod
    def _checked(ids, weights):
        if ids.size != weights.size:
            raise InvalidParamsError("ids and weights differ in length")
        if np.any(weights <= 0.0) or not np.all(np.isfinite(weights)):
            raise InvalidParamsError("weights must be finite and positive")
        if np.unique(ids).size != ids.size:
            raise InvalidParamsError("element ids must be unique")
        return ids, weights

    def __len__(self):
        return self.ids.size


def _check_weighted(ws: WeightedSet, params, min_m: int = 1):
    if isinstance(params, SketchParams):
        m = params.m
    else:
        m = int(params)
    if m < min_m:
        raise InvalidParamsError(f"signature size must be >= {min_m}")
    if len(ws) == 0:
        raise EmptyInputError("cannot sketch an empty set")
    return m


def _check_ids(ids, m: int, min_m: int = 1):
    ids = np.ascontiguousarray(ids, np.uint64)
    if m < min_m:
        raise InvalidParamsError(f"signature size must be >= {min_m}")
    if ids.size == 0:
        raise EmptyInputError("cannot sketch an empty set")
    return ids


def _wrap(m, sig, stats):
    return Signature(sig, m), SketchStats._from_array(stats)


def pminhash(ws: WeightedSet, params) -> tuple[Signature, SketchStats]:
    """Baseline: m independent exponential draws per element, argmin per
    component.  Theta(n*m) work."""
    m = _check_weighted(ws, params)
    return _wrap(m, *_k._k_pminhash(ws.ids, ws.weights, m))


def probminhash1(ws: WeightedSet, params) -> tuple[Signature, SketchStats]:
    """Labels with replacement, uncorrelated ascending points; statistically
    equivalent to pminhash."""
    m = _check_weighted(ws, params)
    return _wrap(m, *_k._k_probminhash1(ws.ids, ws.weights, m))


def probminhash1a(ws: WeightedSet, params) -> tuple[Signature, SketchStats]:
    """Interleaved (buffered) processing; bit-identical to probminhash1."""
    m = _check_weighted(ws, params)
    return _wrap(m, *_k._k_probminhash1a(ws.ids, ws.weights, m))


def probminhash2(ws: WeightedSet, params) -> tuple[Signature, SketchStats]:
    """Labels without replacement via lazy Fisher-Yates; at most m points per
    element."""
    m = _check_weighted(ws, params)
    return _wrap(m, *_k._k_probminhash2(ws.ids, ws.weights, m))


def probminhash3(ws: WeightedSet, params) -> tuple[Signature, SketchStats]:
    """Correlated points: one truncated-exponential point per unit interval.
    Requires m >= 2."""
    m = _check_weighted(ws, params, min_m=2)
    return _wrap(m, *_k._k_probminhash3(ws.ids, ws.weights, m))


def probminhash3a(ws: WeightedSet, params) -> tuple[Signature, SketchStats]:
    """Interleaved variant of probminhash3; bit-identical signatures."""
    m = _check_weighted(ws, params, min_m=2)
    return _wrap(m, *_k._k_probminhash3a(ws.ids, ws.weights, m))


def probminhash4(ws: WeightedSet, params) -> tuple[Signature, SketchStats]:
    """Correlated points and labels without replacement; at most m points per
    element, unbounded exponential tail on the last interval.  Requires
    m >= 2."""
    m = _check_weighted(ws, params, min_m=2)
    return _wrap(m, *_k._k_probminhash4(ws.ids, ws.weights, m))


def minhash(ids, m: int) -> Signature:
    """Classic minwise hashing over plain id sets; Theta(n*m) draws."""
    ids = _check_ids(ids, m)
    return Signature(_k._k_minhash(ids, m), m)


def superminhash(ids, m: int) -> Signature:
    """Uniform draw plus per-element random permutation offset per component;
    lower variance than minhash for small union sizes.  Requires m >= 2."""
    ids = _check_ids(ids, m, min_m=2)
    return Signature(_k._k_superminhash(ids, m), m)


def oph_densified(ids, m: int) -> Signature:
    """One-permutation hashing with re-draw densification of empty bins."""
    ids = _check_ids(ids, m)
    return Signature(_k._k_oph_densified(ids, m), m)


def sketch_unweighted(variant: str, ids, m: int) -> tuple[Signature, SketchStats]:
    """Unweighted specialization of a ProbMinHash variant.

    Variants "1", "1a", "2" run the weighted algorithm with unit weights
    (distribution-identical to minhash); "3", "3a" replace the truncated
    exponential by uniform per-pass points; "4" additionally uses integer
    interval boundaries (distributionally equal to superminhash).
    """
    if variant not in UNWEIGHTED_VARIANTS:
        raise InvalidParamsError(f"unknown variant {variant!r}")
    min_m = 2 if variant in ("3", "3a", "4") else 1
    ids = _check_ids(ids, m, min_m=min_m)
    if variant in ("1", "1a", "2"):
        ones = np.ones(ids.size, np.float64)
        kern = {
            "1": _k._k_probminhash1,
            "1a": _k._k_probminhash1a,
            "2": _k._k_probminhash2,
        }[variant]
        return _wrap(m, *kern(ids, ones, m))
    kern = {
        "3": _k._k_uw_probminhash3,
        "3a": _k._k_uw_probminhash3a,
        "4": _k._k_uw_probminhash4,
    }[variant]
    return _wrap(m, *kern(ids, m))


WEIGHTED_ALGORITHMS = {
    "pminhash": pminhash,
    "probminhash1": probminhash1,
    "probminhash1a": probminhash1a,
    "probminhash2": probminhash2,
    "probminhash3": probminhash3,
    "probminhash3a": probminhash3a,
    "probminhash4": probminhash4,
}
