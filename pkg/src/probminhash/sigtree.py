"""Running maximum over per-component minima under decrease-only updates.

A binary tree is spanned over the m leaves in a flat array of 2m-1 nodes;
each parent holds the maximum of its two children, so the root is
max(h_1,..,h_m).  Decreasing one leaf repairs ancestors bottom-up and stops
as soon as a sibling dominates, which makes updates O(1) expected for
uniformly chosen leaves and O(log m) worst case.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as _k
from .errors import InvalidParamsError


class StopLimitTree:
    """Flat-array max tree over m decrease-only leaves.

    Nodes are 1-based: indices 1..m are the leaves, m + ceil(k/2) is the
    parent of node k, 2m-1 is the root.  Slot 0 is unused.
    """

    __slots__ = ("m", "nodes")

    def __init__(self, m: int):
        if m < 1:
            raise InvalidParamsError("signature size must be >= 1")
        self.m = m
        self.nodes = np.full(2 * m, np.inf)

    def update(self, k: int, h: float) -> int:
        """Decrease leaf k (1-based) to h; h must be below the current leaf
        value.  Returns the number of node writes performed."""
        assert 1 <= k <= self.m
        assert h < self.nodes[k]
        return int(_k._tree_update(self.nodes, self.m, k, h))

    def max(self) -> float:
        return float(self.nodes[2 * self.m - 1])

    def leaf(self, k: int) -> float:
        return float(self.nodes[k])

    def check_invariant(self) -> bool:
        """Full scan: every parent equals the max of its children."""
        children: dict[int, list[float]] = {}
        for k in range(1, 2 * self.m - 1):
            p = self.m + ((k + 1) >> 1)
            children.setdefault(p, []).append(self.nodes[k])
        for p, ch in children.items():
            if self.nodes[p] != max(ch):
                return False
        return True


def tree_new(m: int) -> StopLimitTree:
    return StopLimitTree(m)
