"""Message passing with sliced-cosine multiset aggregation.

Each iteration embeds every vertex's multiset of neighbor states, scales the
result by the neighbor count (isolated vertices aggregate to zero),
concatenates it with the vertex's own state, and applies a linear update.
The readout embeds the multiset of final vertex states, scales by the vertex
count, and applies a linear map.

The size scaling is load-bearing.  The cosine transform of a quantile
function sees only the empirical distribution of a multiset, so {x} and
{x, x} embed identically; without the scaling a path and a cycle with
constant features would collapse to the same output.  Multiplying by the
multiset size restores the count information, and with T = N iterations and
width m >= 2 N d + 2 random linear maps then separate exactly the graph
pairs that color refinement separates, almost surely.  A single-hidden-layer
variant with a ReLU is available behind ``hidden=True``.

All randomness is drawn from one seed, so equal configurations yield
bit-identical models, and the sorted aggregation makes every output exactly
permutation invariant/equivariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fsw import FswParams, embed_multiset, sample_params
from .graphs import VertexFeaturedGraph

__all__ = [
    "UpdateMap",
    "FswGnnModel",
    "init_model",
    "node_embeddings",
    "graph_embedding",
]


def _rowwise_linear(rows: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``rows @ w.T`` with a reduction order fixed per row.

    Each output entry sums over the row's own values only, so equal rows give
    bit-equal outputs no matter where they sit in the batch; BLAS matmul does
    not guarantee that, and exact permutation equivariance needs it.
    """
    rows = np.ascontiguousarray(rows, dtype=float)
    out = np.empty((rows.shape[0], w.shape[0]))
    for j in range(w.shape[0]):
        out[:, j] = (rows * w[j]).sum(axis=1)
    return out


@dataclass(frozen=True)
class UpdateMap:
    """Linear map, or single-hidden-layer ReLU network when ``w_hidden`` set.

    Applied to row-stacked inputs: ``x @ w.T`` (no bias terms, so the map is
    piecewise linear through the origin either way).
    """

    w_out: np.ndarray
    w_hidden: np.ndarray | None = None

    def __post_init__(self):
        w_out = np.asarray(self.w_out, dtype=float)
        if w_out.ndim != 2:
            raise ValueError("w_out must be a matrix")
        w_out = w_out.copy()
        w_out.setflags(write=False)
        object.__setattr__(self, "w_out", w_out)
        if self.w_hidden is not None:
            w_h = np.asarray(self.w_hidden, dtype=float)
            if w_h.ndim != 2 or w_h.shape[0] != w_out.shape[1]:
                raise ValueError("w_hidden output width must match w_out input width")
            w_h = w_h.copy()
            w_h.setflags(write=False)
            object.__setattr__(self, "w_hidden", w_h)

    @property
    def in_dim(self) -> int:
        return (self.w_hidden if self.w_hidden is not None else self.w_out).shape[1]

    @property
    def out_dim(self) -> int:
        return self.w_out.shape[0]

    def apply(self, rows: np.ndarray) -> np.ndarray:
        if self.w_hidden is not None:
            rows = np.maximum(_rowwise_linear(rows, self.w_hidden), 0.0)
        return _rowwise_linear(rows, self.w_out)


@dataclass(frozen=True)
class FswGnnModel:
    """Deterministically initialized model parameters.

    ``step_params[t]`` / ``updates[t]`` drive iteration t+1; ``global_params``
    and ``readout`` produce the graph-level embedding in R^m.
    """

    in_dim: int
    width: int
    iterations: int
    seed: int
    step_params: tuple[FswParams, ...]
    updates: tuple[UpdateMap, ...]
    global_params: FswParams
    readout: UpdateMap

    def __post_init__(self):
        if self.in_dim < 1 or self.width < 1 or self.iterations < 0:
            raise ValueError("in_dim and width must be >= 1, iterations >= 0")
        if len(self.step_params) != self.iterations or len(self.updates) != self.iterations:
            raise ValueError("need exactly one step parameterization per iteration")
        prev = self.in_dim
        for t, (params, update) in enumerate(zip(self.step_params, self.updates)):
            if params.dim != prev or params.num_slices != self.width:
                raise ValueError(f"step {t} aggregation expects dim {prev}, width {self.width}")
            if update.in_dim != prev + self.width or update.out_dim != self.width:
                raise ValueError(f"step {t} update must map {prev + self.width} -> {self.width}")
            prev = self.width
        if self.global_params.dim != prev or self.global_params.num_slices != self.width:
            raise ValueError("global aggregation dimensions inconsistent")
        if self.readout.in_dim != self.width or self.readout.out_dim != self.width:
            raise ValueError("readout must map width -> width")


def init_model(
    in_dim: int,
    width: int,
    iterations: int,
    seed: int,
    hidden: bool = False,
) -> FswGnnModel:
    """Draw a model from a seed: aggregation parameters plus Gaussian maps.

    ``width`` is the embedding/state dimension m; matrix entries are iid
    standard normal.  ``hidden=True`` switches every map to a one-hidden-layer
    ReLU network of width m.
    """
    if in_dim < 1:
        raise ValueError(f"in_dim must be >= 1, got {in_dim}")
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    master = np.random.default_rng(seed)

    def sub_seed() -> int:
        return int(master.integers(0, 2**63 - 1))

    def make_update(in_width: int) -> UpdateMap:
        rng = np.random.default_rng(sub_seed())
        if hidden:
            w_h = rng.standard_normal((width, in_width))
            w_o = rng.standard_normal((width, width))
            return UpdateMap(w_o, w_h)
        return UpdateMap(rng.standard_normal((width, in_width)))

    step_params = []
    updates = []
    prev = in_dim
    for _ in range(iterations):
        step_params.append(sample_params(prev, width, sub_seed()))
        updates.append(make_update(prev + width))
        prev = width
    global_params = sample_params(prev, width, sub_seed())
    readout = make_update(width)
    return FswGnnModel(
        in_dim,
        width,
        iterations,
        int(seed),
        tuple(step_params),
        tuple(updates),
        global_params,
        readout,
    )


def node_embeddings(model: FswGnnModel, g: VertexFeaturedGraph) -> list[np.ndarray]:
    """Vertex states per iteration: a list of arrays, shapes (n, d) then (n, m).

    Entry 0 is the raw feature matrix; entry t is the state after t message
    passing iterations.
    """
    if g.feature_dim != model.in_dim:
        raise ValueError(
            f"graph features have dim {g.feature_dim}, model expects {model.in_dim}"
        )
    states = [g.features.copy()]
    for params, update in zip(model.step_params, model.updates):
        prev = states[-1]
        aggregated = np.empty((g.num_vertices, model.width))
        for v in range(g.num_vertices):
            nbrs = g.neighbors(v)
            aggregated[v] = len(nbrs) * embed_multiset(prev[nbrs], params)
        states.append(update.apply(np.hstack([prev, aggregated])))
    return states


def graph_embedding(model: FswGnnModel, g: VertexFeaturedGraph) -> np.ndarray:
    """Graph-level embedding in R^m: size-scaled readout of the final states."""
    final = node_embeddings(model, g)[-1]
    pooled = g.num_vertices * embed_multiset(final, model.global_params)
    return model.readout.apply(pooled[None, :])[0]
