"""Minwise-hashing signatures for weighted sets.

Sketch algorithms whose component-collision probability equals the
probability Jaccard similarity of the inputs, plus classic unweighted
baselines, exact similarity oracles, and a statistical verification
harness.
"""

from .errors import (
    EmptyInputError,
    InvalidParamsError,
    RandomnessFailureError,
)
from .estimate import (
    BBitSignature,
    WeightPairMultiset,
    bbit_reduce,
    estimate_similarity,
    estimate_similarity_bbit,
    estimator_variance,
    improvement_factor,
    jaccard_exact,
    jaccard_n_exact,
    jaccard_p_exact,
    jaccard_w_exact,
    superminhash_variance,
)
from .lazyperm import LazyPermutation, perm_new
from .rng import RandomStream, TruncExpParams, new_stream
from .sigtree import StopLimitTree, tree_new
from .sketch import (
    WEIGHTED_ALGORITHMS,
    Signature,
    SketchParams,
    SketchStats,
    WeightedSet,
    minhash,
    oph_densified,
    pminhash,
    probminhash1,
    probminhash1a,
    probminhash2,
    probminhash3,
    probminhash3a,
    probminhash4,
    sketch_unweighted,
    superminhash,
)

__all__ = [
    "BBitSignature",
    "EmptyInputError",
    "InvalidParamsError",
    "LazyPermutation",
    "RandomStream",
    "RandomnessFailureError",
    "Signature",
    "SketchParams",
    "SketchStats",
    "StopLimitTree",
    "TruncExpParams",
    "WEIGHTED_ALGORITHMS",
    "WeightPairMultiset",
    "WeightedSet",
    "bbit_reduce",
    "estimate_similarity",
    "estimate_similarity_bbit",
    "estimator_variance",
    "improvement_factor",
    "jaccard_exact",
    "jaccard_n_exact",
    "jaccard_p_exact",
    "jaccard_w_exact",
    "minhash",
    "new_stream",
    "oph_densified",
    "perm_new",
    "pminhash",
    "probminhash1",
    "probminhash1a",
    "probminhash2",
    "probminhash3",
    "probminhash3a",
    "probminhash4",
    "sketch_unweighted",
    "superminhash",
    "superminhash_variance",
    "tree_new",
]

__version__ = "0.1.0"
