"""Exact similarity oracles, estimators, and analytic variance formulas.

These are the independent reference side of the test suite: direct
evaluations of the similarity definitions and closed-form variances, kept
free of any sketching code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .errors import InvalidParamsError
from .sketch import Signature


class WeightPairMultiset:
    """Multiset of (w_A, w_B) weight pairs characterizing a pair of sets.

    Each pair describes one element's weights in the two sets; at least one
    coordinate of every pair is positive.
    """

    __slots__ = ("pairs",)

    def __init__(self, pairs):
        pairs = tuple((float(a), float(b)) for a, b in pairs)
        if not pairs:
            raise InvalidParamsError("multiset must contain at least one pair")
        for a, b in pairs:
            if a < 0 or b < 0 or (a == 0 and b == 0):
                raise InvalidParamsError(
                    "each pair needs a positive coordinate and no negatives")
        self.pairs = pairs

    def __len__(self):
        return len(self.pairs)

    def arrays(self):
        wa = np.array([a for a, _ in self.pairs], np.float64)
        wb = np.array([b for _, b in self.pairs], np.float64)
        return wa, wb


def _pairs(V) -> WeightPairMultiset:
    if isinstance(V, WeightPairMultiset):
        return V
    return WeightPairMultiset(V)


def jaccard_exact(A, B) -> float:
    """|A & B| / |A | B| for plain id sets."""
    A, B = set(A), set(B)
    union = A | B
    if not union:
        raise InvalidParamsError("Jaccard similarity of two empty sets is undefined")
    return len(A & B) / len(union)


def jaccard_p_exact(V) -> float:
    """Probability Jaccard similarity: per shared element, the reciprocal of
    the sum over all elements of the larger weight ratio."""
    wa, wb = _pairs(V).arrays()
    total = 0.0
    for a, b in zip(wa, wb):
        if a > 0 and b > 0:
            total += 1.0 / float(np.sum(np.maximum(wa / a, wb / b)))
    return total


def jaccard_w_exact(V) -> float:
    """Weighted Jaccard: sum of min weights over sum of max weights."""
    wa, wb = _pairs(V).arrays()
    return float(np.sum(np.minimum(wa, wb)) / np.sum(np.maximum(wa, wb)))


def jaccard_n_exact(V) -> float:
    """Weighted Jaccard after normalizing each side's weights to sum 1."""
    wa, wb = _pairs(V).arrays()
    sa, sb = wa.sum(), wb.sum()
    if sa > 0:
        wa = wa / sa
    if sb > 0:
        wb = wb / sb
    return float(np.sum(np.minimum(wa, wb)) / np.sum(np.maximum(wa, wb)))


def estimate_similarity(sa: Signature, sb: Signature) -> float:
    """Fraction of equal signature components (the unbiased estimator)."""
    if sa.m != sb.m:
        raise InvalidParamsError("signature sizes differ")
    return float(np.count_nonzero(sa.components == sb.components)) / sa.m


@dataclass(frozen=True)
class BBitSignature:
    components: np.ndarray  # int64[m], values in {0,..,2^b - 1}
    b: int
    m: int


def bbit_reduce(s: Signature, b: int) -> BBitSignature:
    """Compress each component to the low b bits of a 64-bit hash of
    (component value, component index).

    The mixer is pinned as part of the format: splitmix64's finalizer applied
    to component + 0x9E3779B97F4A7C15 * (index + 1).
    """
    if not 1 <= b <= 16:
        raise InvalidParamsError("b must be in 1..16")
    return BBitSignature(_k._k_bbit(s.components, b), b, s.m)


def estimate_similarity_bbit(sa: BBitSignature, sb: BBitSignature) -> float:
    """Collision-corrected estimator: (C - 2^-b) / (1 - 2^-b), clamped."""
    if sa.m != sb.m or sa.b != sb.b:
        raise InvalidParamsError("signature parameters differ")
    c = np.count_nonzero(sa.components == sb.components) / sa.m
    p = 2.0 ** -sa.b
    return min(1.0, max(0.0, (c - p) / (1.0 - p)))


def improvement_factor(m: int, u: int) -> float:
    """Variance factor of superminhash (and unweighted probminhash4) relative
    to independent-component minhash, for signature size m and union
    cardinality u.

    Summands are evaluated in the log domain so that the l^u powers cannot
    overflow; the inner difference uses expm1 to avoid cancellation.
    """
    if m < 2:
        raise InvalidParamsError("m must be >= 2")
    if u < 2:
        raise InvalidParamsError("u must be >= 2")
    log_den = (u - 1) * math.log(m - 1) + u * math.log(m) + math.log(u - 1)
    terms = []
    for l in range(1, m):
        # (l+1)^u + (l-1)^u - 2 l^u = l^u * (expm1(u log(1+1/l)) + expm1(u log(1-1/l)))
        t = u * math.log1p(1.0 / l)
        if l == 1:
            # (1 - 1/l) term vanishes: value is 2^u - 2
            log_val = t + math.log1p(-2.0 ** (1 - u)) if u > 1 else -math.inf
        else:
            s = u * math.log1p(-1.0 / l)
            if t < 700.0:
                log_val = math.log(math.expm1(t) + math.expm1(s))
            else:
                log_val = t + math.log1p(math.exp(s - t) - 2.0 * math.exp(-t))
        # summand is l^u * ((l+1)^u + (l-1)^u - 2 l^u); log_val holds the
        # log of the bracket divided by l^u, hence the factor 2u log l
        terms.append(math.exp(2.0 * u * math.log(l) + log_val - log_den))
    return 1.0 - math.fsum(terms)


def estimator_variance(j: float, m: int) -> float:
    """Variance j(1-j)/m of the match-fraction estimator with independent
    components."""
    if not 0.0 <= j <= 1.0:
        raise InvalidParamsError("similarity must be in [0,1]")
    if m < 1:
        raise InvalidParamsError("m must be >= 1")
    return j * (1.0 - j) / m


def superminhash_variance(j: float, m: int, u: int) -> float:
    return estimator_variance(j, m) * improvement_factor(m, u)
