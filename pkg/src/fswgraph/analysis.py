"""Empirical bi-Lipschitz distortion reports and oversmoothing diagnostics.

``distortion_report`` compares embedding distances against a reference graph
metric over all pairs in a corpus: pairs with metric value at most
``rho_floor`` are excluded (they should also have negligible embedding
distance; mismatches are flagged as zero-set violations), the rest contribute
ratios  ||E(g) - E(g~)||_2 / rho(g, g~)  whose extremes estimate the lower and
upper Lipschitz constants.

``holder_fit`` fits  dist ~ c * rho^alpha  through the log-log lower envelope.
``dirichlet_energy`` and ``mad`` quantify how much adjacent vertex states
collapse onto each other as iterations deepen.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum

import numpy as np

from .ds_metric import ds_metric_l1, ds_metric_l2
from .gnn import FswGnnModel, graph_embedding
from .graphs import GraphCorpus, VertexFeaturedGraph
from .tmd import tmd

__all__ = [
    "DistortionReport",
    "HolderFit",
    "distortion_report",
    "holder_fit",
    "dirichlet_energy",
    "mad",
]

METRICS = ("ds_l1", "ds_l2", "tmd")


@dataclass(frozen=True)
class DistortionReport:
    """Pairwise ratio statistics of embedding distance to metric distance.

    ``ratios[k]`` corresponds to ``pairs[k]``; ``lower``/``upper`` are the
    smallest and largest ratios (None when no pair survives the floors) and
    ``distortion`` their quotient.  ``violations`` lists pairs breaking
    zero-set coincidence in either direction.
    """

    metric_name: str
    seed: int
    pair_count: int
    excluded_pairs: int
    pairs: tuple[tuple[int, int], ...]
    ratios: tuple[float, ...]
    violations: tuple[tuple[int, int], ...]
    lower: float | None
    upper: float | None
    distortion: float | None

    def __post_init__(self):
        if len(self.pairs) != len(self.ratios):
            raise ValueError("one ratio per surviving pair required")
        if any(not np.isfinite(r) or r <= 0 for r in self.ratios):
            raise ValueError("ratios must be finite and positive")
        if self.ratios:
            if self.lower is None or self.upper is None or self.distortion is None:
                raise ValueError("extremes required when ratios are present")
            if not (self.lower <= self.upper):
                raise ValueError("lower ratio bound above upper bound")

    def to_dict(self) -> dict:
        return {
            "metric": self.metric_name,
            "seed": self.seed,
            "pair_count": self.pair_count,
            "excluded_pairs": self.excluded_pairs,
            "violations": [list(p) for p in self.violations],
            "lower": self.lower,
            "upper": self.upper,
            "distortion": self.distortion,
        }


@dataclass(frozen=True)
class HolderFit:
    """Least-squares exponent fit through the binned log-log lower envelope."""

    exponent: float
    scale: float
    residual: float
    points_used: int


def _metric_fn(metric: str, depth: int | None, corpus: GraphCorpus):
    if metric == "ds_l1":
        return lambda a, b: ds_metric_l1(a, b)[0]
    if metric == "ds_l2":
        return lambda a, b: ds_metric_l2(a, b, tol=1e-6)
    if metric == "tmd":
        k = depth if depth is not None else corpus.max_vertices + 1
        return lambda a, b: tmd(a, b, k)
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def distortion_report(
    corpus: GraphCorpus,
    model: FswGnnModel,
    metric: str = "ds_l1",
    rho_floor: float = 1e-7,
    emb_floor: float = 1e-8,
    depth: int | None = None,
) -> DistortionReport:
    """Ratio statistics of model embedding distances to a graph metric.

    ``depth`` selects the computation-tree depth for the tmd metric (default:
    max corpus vertex count + 1, deep enough to match WL equivalence).
    Metric failures are re-raised with the offending pair attached.
    """
    if corpus.feature_dim != model.in_dim:
        raise ValueError(
            f"corpus features have dim {corpus.feature_dim}, model expects {model.in_dim}"
        )
    fn = _metric_fn(metric, depth, corpus)
    graphs = corpus.graphs
    embeddings = [graph_embedding(model, g) for g in graphs]

    pairs = []
    ratios = []
    violations = []
    excluded = 0
    pair_count = 0
    for i in range(len(graphs)):
        for j in range(i + 1, len(graphs)):
            pair_count += 1
            try:
                rho = fn(graphs[i], graphs[j])
            except Exception as exc:
                raise RuntimeError(f"metric {metric} failed on pair ({i}, {j}): {exc}") from exc
            dist = float(np.linalg.norm(embeddings[i] - embeddings[j]))
            if rho <= rho_floor:
                excluded += 1
                if dist > emb_floor:
                    violations.append((i, j))
            elif dist <= emb_floor:
                violations.append((i, j))
            else:
                pairs.append((i, j))
                ratios.append(dist / rho)
    lower = min(ratios) if ratios else None
    upper = max(ratios) if ratios else None
    distortion = upper / lower if ratios else None
    return DistortionReport(
        metric_name=metric,
        seed=model.seed,
        pair_count=pair_count,
        excluded_pairs=excluded,
        pairs=tuple(pairs),
        ratios=tuple(ratios),
        violations=tuple(violations),
        lower=lower,
        upper=upper,
        distortion=distortion,
    )


def holder_fit(
    rhos,
    dists,
    rho_floor: float = 1e-7,
    num_bins: int = 16,
) -> HolderFit:
    """Fit ``dist ~ scale * rho^exponent`` through the log-log lower envelope.

    Pairs with ``rho <= rho_floor`` or nonpositive distance are dropped; the
    remaining points are bucketed into log-spaced bins over rho, the minimum
    log-distance per bin is kept, and a least-squares line through those
    envelope points gives the exponent.  Raises ValueError when fewer than two
    distinct envelope points remain.
    """
    rhos = np.asarray(rhos, dtype=float)
    dists = np.asarray(dists, dtype=float)
    if rhos.shape != dists.shape or rhos.ndim != 1:
        raise ValueError("rhos and dists must be 1d arrays of equal length")
    keep = (rhos > rho_floor) & (dists > 0)
    rhos = rhos[keep]
    dists = dists[keep]
    if rhos.size < 2:
        raise ValueError("insufficient pairs above the floor for a fit")
    log_rho = np.log(rhos)
    log_dist = np.log(dists)
    lo, hi = log_rho.min(), log_rho.max()
    if hi - lo < 1e-12:
        raise ValueError("insufficient spread in rho for a fit")
    edges = np.linspace(lo, hi, num_bins + 1)
    idx = np.clip(np.searchsorted(edges, log_rho, side="right") - 1, 0, num_bins - 1)
    xs = []
    ys = []
    for b in range(num_bins):
        mask = idx == b
        if not np.any(mask):
            continue
        pos = np.flatnonzero(mask)
        best = pos[np.argmin(log_dist[pos])]
        xs.append(log_rho[best])
        ys.append(log_dist[best])
    if len(xs) < 2:
        raise ValueError("insufficient envelope points for a fit")
    design = np.column_stack([np.asarray(xs), np.ones(len(xs))])
    coef, *_ = np.linalg.lstsq(design, np.asarray(ys), rcond=None)
    fitted = design @ coef
    residual = float(np.sqrt(np.mean((fitted - np.asarray(ys)) ** 2)))
    return HolderFit(float(coef[0]), float(np.exp(coef[1])), residual, len(xs))


def dirichlet_energy(states: np.ndarray, g: VertexFeaturedGraph) -> float:
    """Mean squared state difference across edges: (1/n) sum_E ||h_u - h_v||^2."""
    h = np.asarray(states, dtype=float)
    if h.ndim != 2 or h.shape[0] != g.num_vertices:
        raise ValueError(f"states must have one row per vertex, got shape {h.shape}")
    terms = [float(np.dot(h[u] - h[v], h[u] - h[v])) for u, v in g.edges]
    return fsum(terms) / g.num_vertices


def mad(states: np.ndarray, g: VertexFeaturedGraph) -> float:
    """Mean cosine dissimilarity 1 - cos(h_u, h_v) over edges.

    Edges touching a state of norm below 1e-12 contribute the maximal
    dissimilarity 1.  Edgeless graphs score 0.
    """
    h = np.asarray(states, dtype=float)
    if h.ndim != 2 or h.shape[0] != g.num_vertices:
        raise ValueError(f"states must have one row per vertex, got shape {h.shape}")
    if not g.edges:
        return 0.0
    norms = np.linalg.norm(h, axis=1)
    terms = []
    for u, v in g.edges:
        if norms[u] < 1e-12 or norms[v] < 1e-12:
            terms.append(1.0)
        elif np.array_equal(h[u], h[v]):
            terms.append(0.0)  # cosine of equal vectors is 1, exactly
        else:
            terms.append(1.0 - float(np.dot(h[u], h[v])) / (float(norms[u]) * float(norms[v])))
    return fsum(terms) / len(terms)
