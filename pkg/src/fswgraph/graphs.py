"""Vertex-featured undirected graphs: data model, JSON round-trip, generators.

The on-disk format is a JSON object with keys ``num_vertices`` (int),
``edges`` (list of ``[i, j]`` pairs with ``i < j``) and ``features``
(list of per-vertex float vectors, one per vertex, all the same length).
A corpus file is a JSON array of such objects.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .jsonutil import dumps_stable

__all__ = [
    "GraphFormatError",
    "VertexFeaturedGraph",
    "GraphCorpus",
    "load_graph",
    "save_graph",
    "load_corpus",
    "save_corpus",
    "disjoint_union",
    "relabel",
    "gen_transfer_graph",
    "gen_neighbors_match",
    "enumerate_small_graphs",
]

TRANSFER_TOPOLOGIES = ("ring", "crossring", "cliquepath")

# Marker features for the transfer-task generators.  The blank feature is
# all-ones rather than all-zeros so that every vertex feature is a nonzero
# vector (the tree-metric bi-Lipschitz regime needs 0 outside the feature
# domain).
_SOURCE_FEATURE = (1.0, 0.0)
_TARGET_FEATURE = (0.0, 1.0)
_BLANK_FEATURE = (1.0, 1.0)


class GraphFormatError(ValueError):
    """Malformed graph document or invalid constructor input."""


def _normalize_edges(num_vertices: int, edges: Iterable[Sequence[int]]):
    seen = set()
    out = []
    for e in edges:
        pair = tuple(e)
        if len(pair) != 2:
            raise GraphFormatError(f"edge must be a pair, got {pair!r}")
        i, j = pair
        if not (isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer))):
            raise GraphFormatError(f"edge endpoints must be integers, got {pair!r}")
        i, j = int(i), int(j)
        if i == j:
            raise GraphFormatError(f"self-loop at vertex {i} not allowed")
        if i > j:
            i, j = j, i
        if not (0 <= i < num_vertices and 0 <= j < num_vertices):
            raise GraphFormatError(
                f"edge ({i}, {j}) index out of range for {num_vertices} vertices"
            )
        if (i, j) in seen:
            raise GraphFormatError(f"duplicate edge ({i}, {j})")
        seen.add((i, j))
        out.append((i, j))
    out.sort()
    return tuple(out)


@dataclass(frozen=True, eq=False)
class VertexFeaturedGraph:
    """Undirected graph on vertices ``0..n-1`` with a real feature per vertex.

    ``edges`` is stored as a sorted tuple of ``(i, j)`` pairs with ``i < j``;
    ``features`` is a read-only ``(n, d)`` float array.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    features: np.ndarray

    def __post_init__(self):
        if not isinstance(self.num_vertices, (int, np.integer)) or self.num_vertices < 1:
            raise GraphFormatError(f"num_vertices must be a positive int, got {self.num_vertices!r}")
        object.__setattr__(self, "num_vertices", int(self.num_vertices))
        object.__setattr__(self, "edges", _normalize_edges(self.num_vertices, self.edges))
        try:
            feats = np.array(self.features, dtype=float)
        except (ValueError, TypeError) as exc:
            raise GraphFormatError(f"ragged or non-numeric feature rows: {exc}") from exc
        if feats.ndim != 2:
            raise GraphFormatError(
                f"features must be a 2d array of shape (n, d), got ndim={feats.ndim}"
            )
        if feats.shape[0] != self.num_vertices:
            raise GraphFormatError(
                f"expected {self.num_vertices} feature rows, got {feats.shape[0]}"
            )
        if feats.shape[1] < 1:
            raise GraphFormatError("feature dimension must be >= 1")
        if not np.all(np.isfinite(feats)):
            raise GraphFormatError("features must be finite")
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @cached_property
    def _adjacency_lists(self) -> tuple[np.ndarray, ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(np.array(sorted(ns), dtype=int) for ns in nbrs)

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted array of neighbors of ``v`` (open neighborhood)."""
        return self._adjacency_lists[v]

    def degree(self, v: int) -> int:
        return len(self._adjacency_lists[v])

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.num_vertices, self.num_vertices))
        for i, j in self.edges:
            a[i, j] = 1.0
            a[j, i] = 1.0
        return a

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexFeaturedGraph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and self.edges == other.edges
            and self.features.shape == other.features.shape
            and bool(np.array_equal(self.features, other.features))
        )

    def __hash__(self) -> int:
        return hash((self.num_vertices, self.edges, self.features.tobytes()))


@dataclass(frozen=True)
class GraphCorpus:
    """A finite ordered collection of graphs sharing one feature dimension."""

    graphs: tuple[VertexFeaturedGraph, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "graphs", tuple(self.graphs))
        if len(self.graphs) == 0:
            raise GraphFormatError("corpus must contain at least one graph")
        dims = {g.feature_dim for g in self.graphs}
        if len(dims) != 1:
            raise GraphFormatError(f"corpus mixes feature dimensions {sorted(dims)}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
            if len(self.labels) != len(self.graphs):
                raise GraphFormatError("labels length must match number of graphs")

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def feature_dim(self) -> int:
        return self.graphs[0].feature_dim

    @property
    def max_vertices(self) -> int:
        return max(g.num_vertices for g in self.graphs)


def _graph_from_obj(obj) -> VertexFeaturedGraph:
    if not isinstance(obj, dict):
        raise GraphFormatError(f"graph document must be a JSON object, got {type(obj).__name__}")
    missing = {"num_vertices", "edges", "features"} - set(obj)
    if missing:
        raise GraphFormatError(f"graph document missing keys: {sorted(missing)}")
    n = obj["num_vertices"]
    if not isinstance(n, int):
        raise GraphFormatError(f"num_vertices must be an int, got {n!r}")
    feats = obj["features"]
    if not isinstance(feats, list) or not all(isinstance(row, list) for row in feats):
        raise GraphFormatError("features must be a list of per-vertex lists")
    lens = {len(row) for row in feats}
    if len(lens) > 1:
        raise GraphFormatError(f"ragged feature rows: lengths {sorted(lens)}")
    edges = obj["edges"]
    if not isinstance(edges, list):
        raise GraphFormatError("edges must be a list of pairs")
    return VertexFeaturedGraph(n, tuple(tuple(e) for e in edges), feats)


def _graph_to_obj(g: VertexFeaturedGraph) -> dict:
    return {
        "num_vertices": g.num_vertices,
        "edges": [list(e) for e in g.edges],
        "features": [list(row) for row in g.features],
    }


def load_graph(text: str) -> VertexFeaturedGraph:
    """Parse a graph from JSON text; raises GraphFormatError on bad input."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc}") from exc
    return _graph_from_obj(obj)


def save_graph(g: VertexFeaturedGraph) -> str:
    """Serialize a graph to canonical JSON text (byte-stable, exact floats)."""
    return dumps_stable(_graph_to_obj(g))


def load_corpus(text: str) -> GraphCorpus:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, list):
        raise GraphFormatError("corpus document must be a JSON array of graph objects")
    return GraphCorpus(tuple(_graph_from_obj(o) for o in obj))


def save_corpus(corpus: GraphCorpus) -> str:
    return dumps_stable([_graph_to_obj(g) for g in corpus.graphs])


def disjoint_union(g1: VertexFeaturedGraph, g2: VertexFeaturedGraph) -> VertexFeaturedGraph:
    """Disjoint union; vertices of ``g2`` are shifted by ``g1.num_vertices``."""
    if g1.feature_dim != g2.feature_dim:
        raise GraphFormatError(
            f"feature dimension mismatch: {g1.feature_dim} vs {g2.feature_dim}"
        )
    off = g1.num_vertices
    edges = list(g1.edges) + [(i + off, j + off) for i, j in g2.edges]
    feats = np.vstack([g1.features, g2.features])
    return VertexFeaturedGraph(g1.num_vertices + g2.num_vertices, tuple(edges), feats)


def relabel(g: VertexFeaturedGraph, perm: Sequence[int]) -> VertexFeaturedGraph:
    """Relabel vertices: vertex ``v`` becomes ``perm[v]``."""
    perm = list(perm)
    if sorted(perm) != list(range(g.num_vertices)):
        raise GraphFormatError("perm must be a permutation of range(num_vertices)")
    inv = np.argsort(perm)
    feats = g.features[inv]
    edges = tuple((perm[i], perm[j]) for i, j in g.edges)
    return VertexFeaturedGraph(g.num_vertices, edges, feats)


def _transfer_features(n: int, source: int, target: int) -> np.ndarray:
    feats = np.tile(np.array(_BLANK_FEATURE), (n, 1))
    feats[source] = _SOURCE_FEATURE
    feats[target] = _TARGET_FEATURE
    return feats


def gen_transfer_graph(topology: str, radius: int) -> VertexFeaturedGraph:
    """Generate a feature-transfer task graph on ``2*radius`` vertices.

    The source (vertex 0) carries the feature ``[1, 0]``, the target carries
    ``[0, 1]``, every other vertex the blank feature ``[1, 1]``; source and
    target sit at graph distance exactly ``radius``.

    Topologies: ``ring`` (even cycle, antipodal endpoints), ``crossring``
    (ring plus chords between mirror vertices, which leave the source-target
    distance unchanged), ``cliquepath`` (a clique on ``radius + 1`` vertices
    containing the source, with a path to the target attached).
    """
    if topology not in TRANSFER_TOPOLOGIES:
        raise GraphFormatError(
            f"unknown topology {topology!r}; expected one of {TRANSFER_TOPOLOGIES}"
        )
    if not (2 <= radius <= 20):
        raise GraphFormatError(f"radius must be in [2, 20], got {radius}")
    r = radius
    n = 2 * r
    if topology == "ring":
        edges = [(v, (v + 1) % n) for v in range(n)]
        source, target = 0, r
    elif topology == "crossring":
        edges = [(v, (v + 1) % n) for v in range(n)]
        edges += [(i, n - i) for i in range(1, r)]
        source, target = 0, r
    else:  # cliquepath
        edges = list(itertools.combinations(range(r + 1), 2))
        edges += [(v, v + 1) for v in range(r, n - 1)]
        source, target = 0, n - 1
    return VertexFeaturedGraph(n, tuple(edges), _transfer_features(n, source, target))


def gen_neighbors_match(radius: int) -> VertexFeaturedGraph:
    """Complete binary tree of depth ``radius`` for the neighbors-match task.

    The tree has ``2**(radius+1) - 1`` vertices rooted at vertex 0; vertex
    ``v`` has children ``2v+1`` and ``2v+2``.  The ``2**radius`` leaves carry
    distinct one-hot features, the root carries a dedicated query feature,
    and interior vertices carry the all-ones blank feature.
    """
    if not (2 <= radius <= 12):
        raise GraphFormatError(f"radius must be in [2, 12], got {radius}")
    n_leaves = 2**radius
    n = 2 ** (radius + 1) - 1
    first_leaf = n_leaves - 1
    edges = [(v, c) for v in range(first_leaf) for c in (2 * v + 1, 2 * v + 2)]
    d = n_leaves + 1
    feats = np.ones((n, d))
    for k in range(n_leaves):
        feats[first_leaf + k] = 0.0
        feats[first_leaf + k, k] = 1.0
    feats[0] = 0.0
    feats[0, n_leaves] = 1.0
    return VertexFeaturedGraph(n, tuple(edges), feats)


def enumerate_small_graphs(n: int, feature: Sequence[float]) -> GraphCorpus:
    """All graphs on ``n`` labelled vertices, every vertex carrying ``feature``.

    Enumerates the ``2**(n*(n-1)/2)`` subsets of possible edges in a fixed
    deterministic order; ``n`` must be at most 6.
    """
    if not (1 <= n <= 6):
        raise GraphFormatError(f"n must be in [1, 6], got {n}")
    feature = np.asarray(feature, dtype=float)
    if feature.ndim != 1 or feature.size < 1:
        raise GraphFormatError("feature must be a nonempty 1d vector")
    feats = np.tile(feature, (n, 1))
    pairs = list(itertools.combinations(range(n), 2))
    graphs = []
    labels = []
    for mask in range(2 ** len(pairs)):
        edges = tuple(p for k, p in enumerate(pairs) if mask >> k & 1)
        graphs.append(VertexFeaturedGraph(n, edges, feats))
        labels.append(f"n{n}-e{mask}")
    return GraphCorpus(tuple(graphs), tuple(labels))
