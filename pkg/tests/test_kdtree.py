import numpy as np
import pytest

from pbbc.errors import MissingLeafBox
from pbbc.kdtree import KdTree
from pbbc.model import Aabb, ParticleSet


def line_set(xs):
    """2D particles along the x axis (dims >= 2 is required)."""
    pts = np.zeros((len(xs), 2))
    pts[:, 0] = xs
    return ParticleSet(pts)


def leaf_id_sets(tree):
    return [sorted(int(i) for i in leaf.particle_ids) for leaf in tree.leaves()]


def oracle_split(ids, coords, r):
    """Recursive sort-and-split reference: median by (coord, id) goes to
    the larger-coordinate child, split along the widest dimension."""
    if len(ids) <= r:
        return [sorted(ids)]
    pts = coords[ids]
    extents = pts.max(axis=0) - pts.min(axis=0)
    dim = int(np.argmax(extents))
    ordered = sorted(ids, key=lambda i: (coords[i, dim], i))
    k = len(ids) // 2
    return oracle_split(ordered[:k], coords, r) + oracle_split(ordered[k:], coords, r)


class TestBuild:
    def test_five_point_line(self):
        ps = line_set([5.0, 1.0, 9.0, 3.0, 7.0])
        tree = KdTree.build(ps, r=2)
        xs = [sorted(ps.coords[leaf.particle_ids, 0].tolist()) for leaf in tree.leaves()]
        assert xs == [[1.0, 3.0], [5.0], [7.0, 9.0]]

    def test_small_set_single_leaf(self):
        ps = line_set([1.0, 2.0, 3.0, 4.0])
        tree = KdTree.build(ps, r=10)
        assert tree.num_leaves() == 1
        assert tree.root.is_leaf
        assert len(tree.root.particle_ids) == 4

    def test_balanced_sizes_and_capacity(self):
        rng = np.random.default_rng(5)
        ps = ParticleSet(rng.random((1000, 2)))
        tree = KdTree.build(ps, r=100)
        sizes = [len(leaf.particle_ids) for leaf in tree.leaves()]
        assert max(sizes) <= 100

        def check_balance(node, n):
            if node.is_leaf:
                return
            nl = _count(node.left)
            nr = _count(node.right)
            assert {nl, nr} == {n // 2, n - n // 2}
            check_balance(node.left, nl)
            check_balance(node.right, nr)

        def _count(node):
            if node.is_leaf:
                return len(node.particle_ids)
            return _count(node.left) + _count(node.right)

        check_balance(tree.root, 1000)

    def test_matches_recursive_oracle(self):
        rng = np.random.default_rng(17)
        ps = ParticleSet(rng.random((257, 3)))
        tree = KdTree.build(ps, r=20)
        expected = oracle_split(list(range(257)), ps.coords, 20)
        assert leaf_id_sets(tree) == expected

    def test_duplicate_coordinates_split_by_id(self):
        ps = line_set([2.0] * 7)
        tree = KdTree.build(ps, r=2)
        union = sorted(i for leaf in tree.leaves() for i in leaf.particle_ids)
        assert union == list(range(7))
        expected = oracle_split(list(range(7)), ps.coords, 2)
        assert leaf_id_sets(tree) == expected


class TestLeaves:
    def test_single_leaf_is_root(self):
        ps = line_set([1.0])
        tree = KdTree.build(ps, r=4)
        assert tree.leaves() == [tree.root]

    def test_disjoint_cover(self):
        rng = np.random.default_rng(23)
        ps = ParticleSet(rng.random((10_000, 3)))
        tree = KdTree.build(ps, r=64)
        seen = np.concatenate([leaf.particle_ids for leaf in tree.leaves()])
        assert len(seen) == 10_000
        assert np.array_equal(np.sort(seen), np.arange(10_000))
        ids = [leaf.leaf_id for leaf in tree.leaves()]
        assert ids == list(range(len(ids)))


def build_with_boxes(points, r, boxes):
    ps = ParticleSet(np.asarray(points, dtype=np.float64))
    tree = KdTree.build(ps, r)
    assert tree.num_leaves() == len(boxes)
    for leaf, box in zip(tree.leaves(), boxes):
        leaf.box = box
        if box is None:  # a hidden leaf has no particles left either
            leaf.particle_ids = np.empty(0, dtype=np.int64)
    tree.init_box_index()
    return tree


class TestBoxIndex:
    def test_root_is_hull(self):
        tree = build_with_boxes(
            [[0.1, 0.1], [2.9, 2.9]],
            r=1,
            boxes=[Aabb((0.0, 0.0), (1.0, 1.0)), Aabb((2.0, 2.0), (3.0, 3.0))],
        )
        assert tree.root.box == Aabb((0.0, 0.0), (3.0, 3.0))

    def test_hidden_child(self):
        live = Aabb((2.0, 2.0), (3.0, 3.0))
        tree = build_with_boxes([[0.1, 0.1], [2.9, 2.9]], r=1, boxes=[None, live])
        # hide the empty leaf's particles too, mirroring reducer behavior
        assert tree.root.box == live

    def test_missing_leaf_box(self):
        ps = ParticleSet(np.array([[0.1, 0.1], [2.9, 2.9]]))
        tree = KdTree.build(ps, r=1)
        tree.leaves()[0].box = Aabb((0.0, 0.0), (1.0, 1.0))
        with pytest.raises(MissingLeafBox):
            tree.init_box_index()

    def test_random_tree_root_equals_flat_hull(self):
        rng = np.random.default_rng(31)
        pts = rng.random((64, 3))
        boxes = []
        for i in range(64):
            lo = rng.random(3)
            hi = lo + rng.random(3)
            boxes.append(Aabb(tuple(lo), tuple(hi)))
        tree = build_with_boxes(pts, r=1, boxes=boxes)
        flat = None
        for b in boxes:
            flat = Aabb.hull(flat, b)
        assert tree.root.box == flat


class TestQuery:
    def test_basic_overlap(self):
        tree = build_with_boxes(
            [[1.0, 1.0], [2.5, 2.5]],
            r=1,
            boxes=[Aabb((0.5, 0.5), (1.5, 1.5)), Aabb((2.0, 2.0), (3.0, 3.0))],
        )
        hits = tree.query_intersections(Aabb((0.0, 0.0), (1.0, 1.0)))
        assert [h.leaf_id for h in hits] == [0]

    def test_touching_edge_included(self):
        tree = build_with_boxes(
            [[1.0, 1.0], [2.5, 2.5]],
            r=1,
            boxes=[Aabb((0.5, 0.5), (1.5, 1.5)), Aabb((2.0, 2.0), (3.0, 3.0))],
        )
        hits = tree.query_intersections(Aabb((1.5, 0.0), (2.0, 2.0)))
        assert [h.leaf_id for h in hits] == [0, 1]

    def test_matches_brute_force(self):
        rng = np.random.default_rng(37)
        pts = rng.random((256, 2))
        boxes = []
        for _ in range(256):
            lo = rng.random(2) * 4
            hi = lo + rng.random(2)
            boxes.append(Aabb(tuple(lo), tuple(hi)))
        tree = build_with_boxes(pts, r=1, boxes=boxes)
        leaves = tree.leaves()
        for _ in range(200):
            lo = rng.random(2) * 4
            probe = Aabb(tuple(lo), tuple(lo + rng.random(2) * 2))
            got = sorted(h.leaf_id for h in tree.query_intersections(probe))
            want = sorted(
                leaf.leaf_id for leaf in leaves if leaf.box is not None and leaf.box.intersects(probe)
            )
            assert got == want


class TestUpdateLeafBox:
    def _random_tree(self, seed, n=128):
        rng = np.random.default_rng(seed)
        pts = rng.random((n, 3))
        boxes = []
        for _ in range(n):
            lo = rng.random(3)
            boxes.append(Aabb(tuple(lo), tuple(lo + rng.random(3))))
        return build_with_boxes(pts, r=1, boxes=boxes), rng

    def _assert_hulls(self, node):
        if node.is_leaf:
            return node.box
        left = self._assert_hulls(node.left)
        right = self._assert_hulls(node.right)
        assert node.box == Aabb.hull(left, right)
        return node.box

    def test_shrink_keeps_valid_hulls(self):
        tree, rng = self._random_tree(41)
        for leaf in rng.choice(tree.leaves(), 30, replace=False):
            lo = np.asarray(leaf.box.lo)
            hi = np.asarray(leaf.box.hi)
            mid = (lo + hi) / 2
            tree.update_leaf_box(leaf, Aabb(tuple(lo), tuple(mid + 1e-9)))
            self._assert_hulls(tree.root)

    def test_grow_keeps_valid_hulls(self):
        tree, rng = self._random_tree(43)
        for leaf in rng.choice(tree.leaves(), 30, replace=False):
            lo = np.asarray(leaf.box.lo) - rng.random(3)
            hi = np.asarray(leaf.box.hi) + rng.random(3)
            tree.update_leaf_box(leaf, Aabb(tuple(lo), tuple(hi)))
            self._assert_hulls(tree.root)

    def test_hide_last_live_leaf_hides_parent(self):
        tree = build_with_boxes(
            [[0.1, 0.1], [2.9, 2.9]],
            r=1,
            boxes=[Aabb((0.0, 0.0), (1.0, 1.0)), Aabb((2.0, 2.0), (3.0, 3.0))],
        )
        tree.update_leaf_box(tree.leaves()[0], None)
        assert tree.root.box == Aabb((2.0, 2.0), (3.0, 3.0))
        tree.update_leaf_box(tree.leaves()[1], None)
        assert tree.root.box is None

    def test_noop_update_is_identity(self):
        tree, _ = self._random_tree(47)
        before = [(n.leaf_id, n.box) for n in tree.leaves()]
        root_before = tree.root.box
        leaf = tree.leaves()[5]
        tree.update_leaf_box(leaf, leaf.box)
        assert [(n.leaf_id, n.box) for n in tree.leaves()] == before
        assert tree.root.box == root_before

    def test_touches_exactly_path_to_root(self):
        tree, _ = self._random_tree(53)
        for leaf in tree.leaves()[:10]:
            assert tree.update_leaf_box(leaf, leaf.box) == leaf.depth() + 1
