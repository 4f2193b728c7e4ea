"""Stop-limit tree tests: brute-force max oracle, parent layout, and the
expected-O(1) update cost."""

import math
import random

import numpy as np
import pytest

from probminhash import StopLimitTree, tree_new
from probminhash.errors import InvalidParamsError


def test_fresh_tree_all_infinite():
    t = tree_new(4)
    assert t.nodes[1:].size == 7
    assert np.all(np.isinf(t.nodes[1:]))
    assert t.max() == math.inf


def test_single_leaf_tree():
    t = tree_new(1)
    assert t.max() == math.inf
    t.update(1, 2.5)
    assert t.max() == 2.5


def test_rejects_zero_size():
    with pytest.raises(InvalidParamsError):
        tree_new(0)


def test_parent_map_m3():
    # brute force the index formula: parent of k is m + ceil(k/2); every
    # non-root node has a parent, the root (2m-1) has none
    m = 3
    parents = {k: m + ((k + 1) >> 1) for k in range(1, 2 * m - 1)}
    assert parents == {1: 4, 2: 4, 3: 5, 4: 5}
    assert all(1 <= p <= 2 * m - 1 for p in parents.values())


def test_two_leaf_update_examples():
    t = tree_new(2)
    t.update(1, 5.0)
    t.update(2, 3.0)
    assert t.max() == 5.0
    t.update(1, 4.0)
    assert t.max() == 4.0
    # sibling dominates: one leaf write, traversal stops at the parent check
    assert t.update(2, 1.0) == 1
    assert t.max() == 4.0


@pytest.mark.parametrize("m", [1, 3, 8, 17])
def test_random_decreases_match_brute_force(m):
    rng = random.Random(m)
    t = tree_new(m)
    leaves = [math.inf] * (m + 1)
    for _ in range(5000):
        k = rng.randrange(1, m + 1)
        # subtractive decrease: stays exactly representable, never underflows
        h = rng.uniform(0.0, 1.0) if leaves[k] == math.inf \
            else leaves[k] - rng.uniform(0.1, 1.0)
        writes = t.update(k, h)
        leaves[k] = h
        assert t.max() == max(leaves[1:])
        assert t.leaf(k) == h
        assert writes <= (int(math.ceil(math.log2(m))) if m > 1 else 0) + 1
    assert t.check_invariant()


def test_expected_writes_bounded():
    # geometric-series argument: mean ancestor writes per uniform-label
    # decrease is at most 1 + 1/2 + 1/4 + ... = 2; assert a slack bound of 3
    m = 64
    rng = random.Random(1)
    t = tree_new(m)
    leaves = [math.inf] * (m + 1)
    total = 0
    count = 20_000
    for _ in range(count):
        k = rng.randrange(1, m + 1)
        h = rng.uniform(0.0, 1.0) if leaves[k] == math.inf \
            else leaves[k] - rng.uniform(0.1, 1.0)
        total += t.update(k, h)
        leaves[k] = h
    assert total / count <= 3.0


def test_update_precondition_assert():
    t = tree_new(2)
    t.update(1, 1.0)
    with pytest.raises(AssertionError):
        t.update(1, 2.0)
