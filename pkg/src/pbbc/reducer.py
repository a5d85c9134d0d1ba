"""Greedy bit-box reduction: repeatedly eliminate the cheapest box,
quantize its particles (plus common particles of intersecting boxes),
and rebuild the surviving boxes.

Each elimination emits one Sequence; the loop ends when no particles
remain. Because a box can swallow an intersecting neighbor's entire
subregion, the number of emitted sequences can be strictly smaller than
the number of boxes built initially.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .bitbox import BitBox, build_bitbox, lossless_threshold, quantize_block
from .errors import NoLiveBoxes
from .kdtree import KdTree
from .model import CompressorConfig, ParticleSet, resolve_error_bound

# internal width marker for dimensions stored raw at source precision
LOSSLESS_WIDTH = -1


def float_to_bits(values, precision: int) -> np.ndarray:
    """Bit patterns of values at the given precision, widened to uint64."""
    v = np.ascontiguousarray(values, dtype=np.float64)
    if precision == 32:
        return v.astype(np.float32).view(np.uint32).astype(np.uint64)
    return v.view(np.uint64)


def bits_to_float(bits, precision: int) -> np.ndarray:
    """Inverse of float_to_bits; always returns float64."""
    b = np.ascontiguousarray(bits, dtype=np.uint64)
    if precision == 32:
        return b.astype(np.uint32).view(np.float32).astype(np.float64)
    return b.view(np.float64)


@dataclass
class Sequence:
    """Payload of one eliminated bit box.

    `codes` has one row per non-center particle and one column per
    dimension: quantized dimensions hold interval codes, lossless
    dimensions hold the source-precision bit pattern of the coordinate,
    and width-0 dimensions hold zeros (they occupy no bits on disk).
    """

    center_id: int
    center: np.ndarray
    widths: np.ndarray  # int64, LOSSLESS_WIDTH marks raw dimensions
    codes: np.ndarray  # (particle_count - 1, D) uint64
    origin_ids: np.ndarray  # (particle_count - 1,) int64

    @property
    def particle_count(self) -> int:
        return self.codes.shape[0] + 1

    @property
    def dims(self) -> int:
        return self.widths.shape[0]

    def raw_values(self, precision: int) -> dict:
        """Dimension -> decoded source-precision reals for lossless dims."""
        return {
            int(d): bits_to_float(self.codes[:, d], precision)
            for d in np.nonzero(self.widths == LOSSLESS_WIDTH)[0]
        }

    def width_sum_key(self, precision: int) -> int:
        total = 0
        for m in self.widths:
            total += precision + 1 if m == LOSSLESS_WIDTH else int(m)
        return total


@dataclass
class EliminationRecord:
    width_sum: int  # selection key of the removed box
    absorbed: int  # particles removed this round, center included
    boxes_updated: int  # intersecting boxes rebuilt or hidden


@dataclass
class ReductionTrace:
    initial_box_count: int
    records: list = field(default_factory=list)

    @property
    def n_seq(self) -> int:
        return len(self.records)


class BoxHeap:
    """Min-heap over (width-sum key, leaf id) with lazy invalidation.

    Re-pushing a leaf supersedes its previous entry; stale entries are
    skipped on pop. Ties resolve to the smallest leaf id.
    """

    def __init__(self):
        self._heap: list = []
        self._current: dict = {}
        self._tokens = 0

    def __len__(self) -> int:
        return len(self._current)

    def push(self, leaf_id: int, key: int) -> None:
        self._tokens += 1
        self._current[leaf_id] = self._tokens
        heapq.heappush(self._heap, (key, leaf_id, self._tokens))

    def remove(self, leaf_id: int) -> None:
        self._current.pop(leaf_id, None)

    def pop(self):
        """(leaf_id, key) of the live minimum."""
        while self._heap:
            key, leaf_id, token = heapq.heappop(self._heap)
            if self._current.get(leaf_id) == token:
                del self._current[leaf_id]
                return leaf_id, key
        raise NoLiveBoxes("no live bit boxes remain")


def pick_next_box(live_boxes: dict, precision: int) -> int:
    """Linear-scan argmin over {leaf_id: BitBox}: smallest width-sum key,
    ties to the smallest leaf id."""
    if not live_boxes:
        raise NoLiveBoxes("no live bit boxes remain")
    return min(
        live_boxes, key=lambda leaf_id: (live_boxes[leaf_id].width_sum_key(precision), leaf_id)
    )


def handle_lossless_dims(widths, precision: int) -> np.ndarray:
    """Mark widths exceeding the storable threshold with LOSSLESS_WIDTH."""
    marked = np.asarray(widths, dtype=np.int64).copy()
    marked[marked > lossless_threshold(precision)] = LOSSLESS_WIDTH
    return marked


def _make_sequence(
    box: BitBox, coded_ids: np.ndarray, particles: ParticleSet, eps: float
) -> Sequence:
    precision = particles.precision
    widths = handle_lossless_dims(box.widths, precision)
    dims = widths.shape[0]
    codes = np.zeros((coded_ids.shape[0], dims), dtype=np.uint64)
    if coded_ids.shape[0]:
        pts = particles.coords[coded_ids]
        for d in range(dims):
            if widths[d] == LOSSLESS_WIDTH:
                codes[:, d] = float_to_bits(pts[:, d], precision)
            elif widths[d] > 0:
                codes[:, d] = quantize_block(pts[:, d], float(box.center[d]), int(widths[d]), eps)
    return Sequence(
        center_id=int(box.center_particle_id),
        center=box.center.copy(),
        widths=widths,
        codes=codes,
        origin_ids=coded_ids.astype(np.int64),
    )


def compress_to_sequences(particles: ParticleSet, config: CompressorConfig):
    """Run the full reduction loop.

    Returns (sequences in emission order, ReductionTrace). Every particle
    lands in exactly one sequence, as a center, a code row, or a raw row.
    """
    eps = resolve_error_bound(config.error_bound, particles)
    r = config.subregion_capacity(particles.num_particles)
    tree = KdTree.build(particles, r)
    return reduce_tree(tree, particles, eps)


def reduce_tree(tree: KdTree, particles: ParticleSet, eps: float):
    coords = particles.coords
    precision = particles.precision
    dims = particles.dims

    leaves = tree.leaves()
    for leaf in leaves:
        leaf.bitbox = build_bitbox(leaf.particle_ids, particles, eps)
        leaf.box = leaf.bitbox.extent
    tree.init_box_index()

    heap = BoxHeap()
    for leaf in leaves:
        heap.push(leaf.leaf_id, leaf.bitbox.width_sum_key(precision))

    trace = ReductionTrace(initial_box_count=len(leaves))
    sequences: list = []
    remaining = particles.num_particles

    while remaining > 0:
        leaf_id, key = heap.pop()
        leaf = leaves[leaf_id]
        box = leaf.bitbox
        extent = box.extent
        lo = np.asarray(extent.lo)
        hi = np.asarray(extent.hi)

        own = leaf.particle_ids
        chunks = [own[own != box.center_particle_id]]
        updated = 0
        for node in tree.query_intersections(extent):
            if node is leaf:
                continue
            ids = node.particle_ids
            pts = coords[ids]
            inside = ((pts >= lo) & (pts <= hi)).all(axis=1)
            if not inside.any():
                continue  # intersecting box but no common particles: unchanged
            chunks.append(ids[inside])
            keep = ids[~inside]
            node.particle_ids = keep
            node.version += 1
            updated += 1
            if keep.shape[0] == 0:
                node.bitbox = None
                heap.remove(node.leaf_id)
                tree.update_leaf_box(node, None)
            else:
                node.bitbox = build_bitbox(keep, particles, eps)
                tree.update_leaf_box(node, node.bitbox.extent)
                heap.push(node.leaf_id, node.bitbox.width_sum_key(precision))

        coded_ids = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
        sequences.append(_make_sequence(box, coded_ids, particles, eps))

        leaf.particle_ids = np.empty(0, dtype=np.int64)
        leaf.bitbox = None
        leaf.version += 1
        tree.update_leaf_box(leaf, None)

        removed = coded_ids.shape[0] + 1
        remaining -= removed
        trace.records.append(EliminationRecord(key, removed, updated))

    assert remaining == 0, "reduction loop lost track of particles"
    return sequences, trace
