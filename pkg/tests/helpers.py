"""Shared builders and independent oracles for the test suite.

The oracles here deliberately avoid the library's own code paths: quadrature
goes through scipy, assignments through exhaustive enumeration, shortest paths
through a plain BFS.
"""

import itertools
import math
from collections import deque

import numpy as np
from scipy import integrate

from fswgraph.graphs import VertexFeaturedGraph, enumerate_small_graphs


def path_graph(n: int, value: float = 1.0) -> VertexFeaturedGraph:
    return VertexFeaturedGraph(n, [(i, i + 1) for i in range(n - 1)], [[value]] * n)


def cycle_graph(n: int, value: float = 1.0) -> VertexFeaturedGraph:
    return VertexFeaturedGraph(n, [(i, (i + 1) % n) for i in range(n)], [[value]] * n)


def random_graph(rng, max_n=6, dim=2, min_n=2, edge_prob=0.5) -> VertexFeaturedGraph:
    n = int(rng.integers(min_n, max_n + 1))
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob
    ]
    return VertexFeaturedGraph(n, edges, rng.normal(size=(n, dim)))


def constant_corpus(max_n: int):
    """Every labeled graph on 1..max_n vertices, all features pinned to [1.0]."""
    graphs = []
    for n in range(1, max_n + 1):
        graphs.extend(enumerate_small_graphs(n, [1.0]).graphs)
    return graphs


def bfs_distance(g: VertexFeaturedGraph, source: int, target: int):
    adj = {v: [] for v in range(g.num_vertices)}
    for i, j in g.edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        if v == target:
            return seen[v]
        for w in adj[v]:
            if w not in seen:
                seen[w] = seen[v] + 1
                queue.append(w)
    return None


def brute_force_assignment(cost):
    """Exhaustive minimum assignment; first optimum in lex order wins ties."""
    cost = np.asarray(cost, dtype=float)
    k = cost.shape[0]
    best = None
    best_perm = None
    for perm in itertools.permutations(range(k)):
        total = math.fsum(cost[i, perm[i]] for i in range(k))
        if best is None or total < best:
            best = total
            best_perm = perm
    return best, best_perm


def quad_cosine(sorted_values, freq: float) -> float:
    """2(1+xi) * integral of the step quantile times cos(2 pi xi t) via scipy.

    The quantile of a multiset {y_1 <= ... <= y_n} is the step function equal
    to y_j on ((j-1)/n, j/n]; scipy integrates each smooth piece separately.
    """
    y = np.asarray(sorted_values, dtype=float)
    n = y.size

    def integrand(t):
        j = min(int(math.ceil(t * n)) - 1, n - 1)
        return y[max(j, 0)] * math.cos(2.0 * math.pi * freq * t)

    breaks = [j / n for j in range(1, n)]
    total, _ = integrate.quad(
        integrand, 0.0, 1.0, points=breaks or None, limit=500,
        epsabs=1e-13, epsrel=1e-13,
    )
    return 2.0 * (1.0 + freq) * total


def rel_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)), 1e-300)
    return float(np.linalg.norm(a - b)) / denom
