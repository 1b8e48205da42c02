"""Optimal matching primitives and the tree mover's distance between graphs.

``wasserstein_1d`` matches two equal-size scalar multisets by sorting.
``assignment_min_cost`` solves the square min-cost assignment exactly
(Hungarian method with potentials, O(k^3)) and among optimal permutations
returns the lexicographically smallest.

``tree_distance`` compares rooted feature-labelled trees: the root cost is the
l1 feature distance, child multisets are padded to equal size with blank
(single-node, zero-feature) trees and matched optimally, recursively.
``tmd`` lifts this to graphs by matching the multisets of depth-K computation
trees, padded with blanks to ``max(n1, n2)``.  Positive homogeneous of degree
one in the features; zero exactly on pairs that refinement cannot separate
once K exceeds the vertex count.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum

import numpy as np

from .graphs import VertexFeaturedGraph
from .wl import ComputationTree, blank_tree

__all__ = [
    "Assignment",
    "wasserstein_1d",
    "assignment_min_cost",
    "augment_pad",
    "tree_distance",
    "tmd",
    "MAX_TMD_DEPTH",
]

# Computation trees grow exponentially with depth; the memoized recursion in
# tmd() is linear in depth, but depths beyond this are never informative for
# desk-scale graphs and are rejected to keep runtime predictable.
MAX_TMD_DEPTH = 14


@dataclass(frozen=True)
class Assignment:
    """Result of a min-cost assignment: total cost and column-for-row map."""

    value: float
    permutation: tuple[int, ...]


def wasserstein_1d(a, b) -> float:
    """W1 between equal-size scalar multisets: sum |sort(a)_j - sort(b)_j|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("inputs must be 1d")
    if a.size != b.size:
        raise ValueError(f"multisets must have equal size, got {a.size} and {b.size}")
    if a.size == 0:
        return 0.0
    return fsum(np.abs(np.sort(a) - np.sort(b)).tolist())


def _hungarian_cols(cost: np.ndarray) -> list[int]:
    """Columns assigned to rows 0..k-1 by the potentials/augmenting-path method."""
    k = cost.shape[0]
    inf = np.inf
    u = [0.0] * (k + 1)
    v = [0.0] * (k + 1)
    row_of_col = [0] * (k + 1)  # 0 means unassigned; rows are 1-based here
    for i in range(1, k + 1):
        row_of_col[0] = i
        j0 = 0
        minv = [inf] * (k + 1)
        used = [False] * (k + 1)
        way = [0] * (k + 1)
        while True:
            used[j0] = True
            i0 = row_of_col[j0]
            delta = inf
            j1 = 0
            for j in range(1, k + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(k + 1):
                if used[j]:
                    u[row_of_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if row_of_col[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            row_of_col[j0] = row_of_col[j1]
            j0 = j1
    cols = [0] * k
    for j in range(1, k + 1):
        if row_of_col[j]:
            cols[row_of_col[j] - 1] = j - 1
    return cols


def _assignment_value(cost: np.ndarray) -> float:
    """Optimal assignment cost only (no tie-break work); cost is a (k, k) array."""
    k = cost.shape[0]
    if k == 1:
        return float(cost[0, 0])
    if k == 2:
        return min(float(cost[0, 0]) + float(cost[1, 1]),
                   float(cost[0, 1]) + float(cost[1, 0]))
    cols = _hungarian_cols(cost)
    return fsum(float(cost[i, cols[i]]) for i in range(k))


def _validate_cost(cost) -> np.ndarray:
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    if c.shape[0] < 1:
        raise ValueError("cost matrix must be at least 1x1")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix must be finite")
    if np.any(c < 0):
        raise ValueError("cost matrix must be nonnegative")
    return c


def assignment_min_cost(cost) -> Assignment:
    """Exact min-cost assignment on a square nonnegative matrix.

    Among all optimal permutations, the lexicographically smallest (as the
    tuple ``perm[0..k-1]`` of column indices) is returned; ties are decided
    with a 1e-9 relative optimality tolerance.
    """
    c = _validate_cost(cost)
    k = c.shape[0]
    total = _assignment_value(c)
    slack = 1e-9 * (1.0 + abs(total))

    perm: list[int] = []
    free_cols = list(range(k))
    fixed_cost = 0.0
    for i in range(k):
        rest_rows = np.arange(i + 1, k)
        chosen = None
        for j in free_cols:
            candidate = fixed_cost + float(c[i, j])
            if rest_rows.size:
                rest_cols = [col for col in free_cols if col != j]
                candidate += _assignment_value(c[np.ix_(rest_rows, rest_cols)])
            if candidate <= total + slack:
                chosen = j
                break
        if chosen is None:  # unreachable: some column always completes optimally
            raise AssertionError("assignment reconstruction failed")
        perm.append(chosen)
        free_cols.remove(chosen)
        fixed_cost += float(c[i, chosen])
    value = fsum(float(c[i, perm[i]]) for i in range(k))
    return Assignment(value, tuple(perm))


def augment_pad(trees, target_size: int, dim: int | None = None):
    """Pad a list of trees with blank (zero-feature) trees to ``target_size``.

    ``dim`` is only needed when ``trees`` is empty; otherwise the blank
    feature dimension is taken from the first tree.
    """
    trees = list(trees)
    if len(trees) > target_size:
        raise ValueError(f"cannot pad {len(trees)} trees down to {target_size}")
    if trees:
        dim = trees[0].feature.size
    elif dim is None:
        raise ValueError("dim required to pad an empty collection")
    if target_size > len(trees):
        blank = blank_tree(dim)
        trees.extend([blank] * (target_size - len(trees)))
    return trees


def tree_distance(tree_a: ComputationTree, tree_b: ComputationTree) -> float:
    """Optimal-transport distance between rooted feature-labelled trees.

    Root feature l1 distance, plus (when either tree has children) the optimal
    matching between child subtrees after padding the smaller child list with
    blank trees.  Memoized on subtree identity, so trees sharing subtrees
    (as built by ``computation_tree``) compare quickly.
    """
    if tree_a.feature.size != tree_b.feature.size:
        raise ValueError(
            f"feature dimension mismatch: {tree_a.feature.size} vs {tree_b.feature.size}"
        )
    memo: dict[tuple[int, int], float] = {}

    def dist(a: ComputationTree, b: ComputationTree) -> float:
        key = (id(a), id(b))
        found = memo.get(key)
        if found is not None:
            return found
        base = fsum(np.abs(a.feature - b.feature).tolist())
        if a.children or b.children:
            size = max(len(a.children), len(b.children))
            kids_a = augment_pad(a.children, size, a.feature.size)
            kids_b = augment_pad(b.children, size, b.feature.size)
            cost = np.empty((size, size))
            for p, ka in enumerate(kids_a):
                for q, kb in enumerate(kids_b):
                    cost[p, q] = dist(ka, kb)
            base += _assignment_value(cost)
        memo[key] = base
        return base

    return dist(tree_a, tree_b)


def tmd(g1: VertexFeaturedGraph, g2: VertexFeaturedGraph, depth: int) -> float:
    """Tree mover's distance at the given computation-tree depth.

    Matches the two graphs' multisets of depth-``depth`` computation trees,
    padded with blank trees to ``max(n1, n2)``.  Implemented as a recursion
    memoized on (vertex, vertex, level) pairs, so the exponentially large
    unrolled trees are never materialized.
    """
    if g1.feature_dim != g2.feature_dim:
        raise ValueError(
            f"feature dimension mismatch: {g1.feature_dim} vs {g2.feature_dim}"
        )
    if not (1 <= depth <= MAX_TMD_DEPTH):
        raise ValueError(f"depth must be in [1, {MAX_TMD_DEPTH}], got {depth}")

    feats1 = g1.features
    feats2 = g2.features
    root_cost = {}
    for v in range(g1.num_vertices):
        for w in range(g2.num_vertices):
            root_cost[v, w] = fsum(np.abs(feats1[v] - feats2[w]).tolist())
    norm1 = [fsum(np.abs(feats1[v]).tolist()) for v in range(g1.num_vertices)]
    norm2 = [fsum(np.abs(feats2[w]).tolist()) for w in range(g2.num_vertices)]

    memo: dict[tuple[int, int, int], float] = {}
    memo_blank1: dict[tuple[int, int], float] = {}
    memo_blank2: dict[tuple[int, int], float] = {}

    def dist_blank(v: int, k: int, g, norms, memo_blank) -> float:
        """Distance between the depth-k tree at v and the blank tree."""
        key = (v, k)
        found = memo_blank.get(key)
        if found is not None:
            return found
        out = norms[v]
        if k > 1:
            out += fsum(dist_blank(u, k - 1, g, norms, memo_blank) for u in g.neighbors(v))
        memo_blank[key] = out
        return out

    def dist(v: int, w: int, k: int) -> float:
        key = (v, w, k)
        found = memo.get(key)
        if found is not None:
            return found
        out = root_cost[v, w]
        if k > 1:
            nbrs1 = g1.neighbors(v)
            nbrs2 = g2.neighbors(w)
            size = max(len(nbrs1), len(nbrs2))
            if size > 0:
                cost = np.zeros((size, size))
                for p in range(size):
                    for q in range(size):
                        if p < len(nbrs1) and q < len(nbrs2):
                            cost[p, q] = dist(nbrs1[p], nbrs2[q], k - 1)
                        elif p < len(nbrs1):
                            cost[p, q] = dist_blank(nbrs1[p], k - 1, g1, norm1, memo_blank1)
                        elif q < len(nbrs2):
                            cost[p, q] = dist_blank(nbrs2[q], k - 1, g2, norm2, memo_blank2)
                out += _assignment_value(cost)
        memo[key] = out
        return out

    size = max(g1.num_vertices, g2.num_vertices)
    cost = np.zeros((size, size))
    for p in range(size):
        for q in range(size):
            if p < g1.num_vertices and q < g2.num_vertices:
                cost[p, q] = dist(p, q, depth)
            elif p < g1.num_vertices:
                cost[p, q] = dist_blank(p, depth, g1, norm1, memo_blank1)
            elif q < g2.num_vertices:
                cost[p, q] = dist_blank(q, depth, g2, norm2, memo_blank2)
    return _assignment_value(cost)
