"""Color refinement (1-WL), WL equivalence, stable partitions, computation trees.

Iteration 0 colors vertices by exact (bitwise) feature equality.  Each later
iteration refines by the pair (own color, sorted multiset of neighbor colors).
Color ids are canonical: dense integers assigned by first occurrence in vertex
order, so two runs over the same graph are identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import VertexFeaturedGraph, disjoint_union

__all__ = [
    "ColorAssignment",
    "ComputationTree",
    "wl_colors",
    "wl_equivalent",
    "stable_partition",
    "computation_tree",
    "blank_tree",
]


@dataclass(frozen=True)
class ColorAssignment:
    """Vertex colors per refinement iteration: ``colors[t][v]`` for t = 0..T."""

    colors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.colors) < 1:
            raise ValueError("need at least iteration-0 colors")
        n = len(self.colors[0])
        for t, row in enumerate(self.colors):
            if len(row) != n:
                raise ValueError(f"iteration {t} has {len(row)} colors, expected {n}")
        counts = [len(set(row)) for row in self.colors]
        if any(a > b for a, b in zip(counts, counts[1:])):
            raise ValueError("distinct color count must be non-decreasing")

    @property
    def num_iterations(self) -> int:
        return len(self.colors) - 1

    @property
    def num_vertices(self) -> int:
        return len(self.colors[0])

    def color_counts(self) -> tuple[int, ...]:
        return tuple(len(set(row)) for row in self.colors)

    def first_stable_iteration(self) -> int | None:
        """Smallest t with as many colors at t as at t+1, or None if never stable."""
        counts = self.color_counts()
        for t in range(len(counts) - 1):
            if counts[t] == counts[t + 1]:
                return t
        return None


def _canonical_ids(keys) -> tuple[int, ...]:
    table: dict = {}
    out = []
    for k in keys:
        if k not in table:
            table[k] = len(table)
        out.append(table[k])
    return tuple(out)


def _refine_step(g: VertexFeaturedGraph, prev: tuple[int, ...]) -> tuple[int, ...]:
    keys = [
        (prev[v], tuple(sorted(prev[u] for u in g.neighbors(v))))
        for v in range(g.num_vertices)
    ]
    return _canonical_ids(keys)


def wl_colors(g: VertexFeaturedGraph, iterations: int) -> ColorAssignment:
    """Run color refinement for the given number of iterations (>= 0)."""
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    current = _canonical_ids(g.features[v].tobytes() for v in range(g.num_vertices))
    rows = [current]
    for _ in range(iterations):
        current = _refine_step(g, current)
        rows.append(current)
    return ColorAssignment(tuple(rows))


def wl_equivalent(g1: VertexFeaturedGraph, g2: VertexFeaturedGraph) -> bool:
    """True when color refinement cannot separate the two graphs.

    Runs max(n1, n2) iterations on the disjoint union and compares the two
    graphs' color multisets at every iteration, which is enough for the
    refinement to stabilize.  Graphs with different vertex counts are never
    equivalent.
    """
    if g1.feature_dim != g2.feature_dim:
        raise ValueError(
            f"feature dimension mismatch: {g1.feature_dim} vs {g2.feature_dim}"
        )
    if g1.num_vertices != g2.num_vertices:
        return False
    union = disjoint_union(g1, g2)
    n1 = g1.num_vertices
    assignment = wl_colors(union, max(g1.num_vertices, g2.num_vertices))
    for row in assignment.colors:
        if sorted(row[:n1]) != sorted(row[n1:]):
            return False
    return True


def stable_partition(g: VertexFeaturedGraph) -> tuple[tuple[int, ...], ...]:
    """Coarsest refinement fixpoint, as classes of vertex indices.

    Classes are ordered by smallest member; each class is sorted.  The result
    is verified before returning: within a class all vertices share a feature
    vector and have the same number of neighbors in every class.
    """
    n = g.num_vertices
    assignment = wl_colors(g, n)
    t = assignment.first_stable_iteration()
    if t is None:  # unreachable: distinct counts are bounded by n over n+1 iterations
        raise AssertionError("refinement failed to stabilize within n iterations")
    colors = assignment.colors[t]
    by_color: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        by_color.setdefault(c, []).append(v)
    parts = tuple(tuple(sorted(vs)) for vs in sorted(by_color.values(), key=min))
    class_of = {v: k for k, part in enumerate(parts) for v in part}
    for part in parts:
        ref_feat = g.features[part[0]]
        ref_counts = None
        for v in part:
            if not np.array_equal(g.features[v], ref_feat):
                raise AssertionError("stable partition mixes distinct features")
            counts = [0] * len(parts)
            for u in g.neighbors(v):
                counts[class_of[u]] += 1
            if ref_counts is None:
                ref_counts = counts
            elif counts != ref_counts:
                raise AssertionError("stable partition violates neighbor-count equity")
    return parts


@dataclass(frozen=True, eq=False)
class ComputationTree:
    """Rooted feature-labelled tree; children order is non-semantic.

    Instances built by :func:`computation_tree` share identical subtrees, so
    memory stays linear in ``num_vertices * depth`` even though the unrolled
    tree is exponentially large.  Equality is identity; distances between
    trees are the business of the tree metric, not ``==``.
    """

    feature: np.ndarray
    children: tuple["ComputationTree", ...]
    depth: int

    def __post_init__(self):
        feat = np.asarray(self.feature, dtype=float)
        if feat.ndim != 1 or feat.size < 1:
            raise ValueError("tree feature must be a nonempty 1d vector")
        feat = feat.copy()
        feat.setflags(write=False)
        object.__setattr__(self, "feature", feat)
        want = 1 + max((c.depth for c in self.children), default=0)
        if self.depth != want:
            raise ValueError(f"depth {self.depth} inconsistent with children (want {want})")

    @property
    def num_nodes(self) -> int:
        """Node count of the unrolled tree (shared subtrees counted repeatedly)."""
        return 1 + sum(c.num_nodes for c in self.children)


def blank_tree(dim: int) -> ComputationTree:
    """Single-node tree with the zero feature of the given dimension."""
    return ComputationTree(np.zeros(dim), (), 1)


def computation_tree(g: VertexFeaturedGraph, root: int, depth: int) -> ComputationTree:
    """Depth-``depth`` unrolling of the graph at ``root``.

    Depth 1 is the root alone; each extra level extends every leaf by all its
    graph neighbors, revisiting the parent.  Subtrees are shared across equal
    (vertex, depth) pairs.
    """
    if not (0 <= root < g.num_vertices):
        raise ValueError(f"root {root} out of range for {g.num_vertices} vertices")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    memo: dict[tuple[int, int], ComputationTree] = {}

    def build(v: int, k: int) -> ComputationTree:
        key = (v, k)
        node = memo.get(key)
        if node is None:
            if k == 1:
                node = ComputationTree(g.features[v], (), 1)
            else:
                kids = tuple(build(u, k - 1) for u in g.neighbors(v))
                node = ComputationTree(
                    g.features[v], kids, 1 + max((c.depth for c in kids), default=0)
                )
            memo[key] = node
        return node

    return build(root, depth)
