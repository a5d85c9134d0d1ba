"""Median-split k-d tree with a hierarchical AABB index over leaf bit boxes.

Leaves hold at most r particles; each split passes through the median
along the widest dimension of the current subregion's AABB, with the
median particle landing on the larger-coordinate side. After leaf bit
boxes are assigned, every internal node carries the hull of its
children's live boxes, giving O(log |B|) intersection queries and
root-path updates during reduction.
"""

from __future__ import annotations

import numpy as np

from .errors import MissingLeafBox
from .model import Aabb, ParticleSet


class KdNode:
    """Tree node; a node is a leaf iff `left` is None.

    Leaves own their remaining particle ids (mutated as the reducer
    consumes particles), their current bit box (`bitbox`, set by the
    reducer) and its extent (`box`); internal nodes keep only the hull of
    the children's live boxes in `box`. A None box means hidden: no live
    bit box below this node.
    """

    __slots__ = (
        "particle_ids",
        "split_dim",
        "split_value",
        "box",
        "parent",
        "left",
        "right",
        "leaf_id",
        "bitbox",
        "version",
    )

    def __init__(self):
        self.particle_ids = None
        self.split_dim = -1
        self.split_value = 0.0
        self.box = None
        self.parent = None
        self.left = None
        self.right = None
        self.leaf_id = -1
        self.bitbox = None
        self.version = 0

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def depth(self) -> int:
        d = 0
        node = self
        while node.parent is not None:
            d += 1
            node = node.parent
        return d

    def __repr__(self) -> str:
        if self.is_leaf:
            n = 0 if self.particle_ids is None else len(self.particle_ids)
            return f"KdNode(leaf_id={self.leaf_id}, particles={n})"
        return f"KdNode(split_dim={self.split_dim}, split_value={self.split_value})"


def _split_ids(ids: np.ndarray, vals: np.ndarray, k: int):
    """Partition ids by (coordinate, particle id) rank so the lower child
    gets exactly k elements and the median lands in the upper child."""
    mc = np.partition(vals, k)[k]
    less = vals < mc
    eq_sorted = np.sort(ids[vals == mc])
    take = k - int(np.count_nonzero(less))
    lower = np.concatenate((ids[less], eq_sorted[:take]))
    upper = np.concatenate((eq_sorted[take:], ids[vals > mc]))
    return lower, upper, float(mc)


class KdTree:
    """Spatial partition of a ParticleSet plus the bit-box interval index."""

    def __init__(self, root: KdNode, leaves: list, particles: ParticleSet):
        self.root = root
        self._leaves = leaves
        self.particles = particles

    @classmethod
    def build(cls, particles: ParticleSet, r: int) -> "KdTree":
        """Split until every leaf holds at most r particles."""
        if r < 1:
            raise ValueError(f"subregion capacity must be >= 1, got {r}")
        coords = particles.coords
        leaves: list = []

        def make(ids: np.ndarray, parent) -> KdNode:
            node = KdNode()
            node.parent = parent
            if ids.shape[0] <= r:
                node.particle_ids = ids
                node.leaf_id = len(leaves)
                leaves.append(node)
                return node
            pts = coords[ids]
            extents = pts.max(axis=0) - pts.min(axis=0)
            dim = int(np.argmax(extents))  # argmax takes the lowest tied index
            lower, upper, mc = _split_ids(ids, pts[:, dim], ids.shape[0] // 2)
            node.split_dim = dim
            node.split_value = mc
            node.left = make(lower, node)
            node.right = make(upper, node)
            return node

        root = make(np.arange(particles.num_particles, dtype=np.int64), None)
        return cls(root, leaves, particles)

    def leaves(self) -> list:
        """All leaves in creation (leaf_id) order."""
        return list(self._leaves)

    def num_leaves(self) -> int:
        return len(self._leaves)

    def live_leaves(self) -> list:
        return [leaf for leaf in self._leaves if leaf.box is not None]

    def init_box_index(self) -> None:
        """Bottom-up hull initialization once every live leaf has its box."""
        for leaf in self._leaves:
            if leaf.box is None and leaf.particle_ids is not None and len(leaf.particle_ids):
                raise MissingLeafBox(f"leaf {leaf.leaf_id} has particles but no bit box")

        def hull_up(node: KdNode):
            if node.is_leaf:
                return node.box
            node.box = Aabb.hull(hull_up(node.left), hull_up(node.right))
            return node.box

        hull_up(self.root)

    def query_intersections(self, probe: Aabb) -> list:
        """Live leaves whose boxes overlap `probe` under closed intervals."""
        plo, phi = probe.lo, probe.hi
        dims = len(plo)
        hits = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            box = node.box
            if box is None:
                continue
            blo, bhi = box.lo, box.hi
            overlap = True
            for d in range(dims):
                if bhi[d] < plo[d] or phi[d] < blo[d]:
                    overlap = False
                    break
            if not overlap:
                continue
            if node.left is None:
                hits.append(node)
            else:
                stack.append(node.right)
                stack.append(node.left)
        return hits

    def update_leaf_box(self, leaf: KdNode, new_box: Aabb | None) -> int:
        """Replace a leaf's box (None hides it) and refresh ancestor hulls
        along the root path. Returns the number of nodes touched."""
        leaf.box = new_box
        touched = 1
        node = leaf.parent
        while node is not None:
            node.box = Aabb.hull(node.left.box, node.right.box)
            touched += 1
            node = node.parent
        return touched
