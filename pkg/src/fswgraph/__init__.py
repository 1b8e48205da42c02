"""Sliced-cosine multiset embeddings, WL-equivalent graph metrics, analysis."""

from .analysis import (
    DistortionReport,
    HolderFit,
    dirichlet_energy,
    distortion_report,
    holder_fit,
    mad,
)
from .ds_metric import FwConvergenceError, TransportPlan, ds_metric_l1, ds_metric_l2
from .fsw import FswParams, embed_multiset, quantile_cosine_integral, sample_params
from .gnn import FswGnnModel, UpdateMap, graph_embedding, init_model, node_embeddings
from .graphs import (
    GraphCorpus,
    GraphFormatError,
    VertexFeaturedGraph,
    disjoint_union,
    enumerate_small_graphs,
    gen_neighbors_match,
    gen_transfer_graph,
    load_corpus,
    load_graph,
    relabel,
    save_corpus,
    save_graph,
)
from .lp import (
    LpError,
    LpInfeasibleError,
    LpIterationError,
    LpProblem,
    LpUnboundedError,
    lp_solve,
)
from .tmd import (
    Assignment,
    assignment_min_cost,
    augment_pad,
    tmd,
    tree_distance,
    wasserstein_1d,
)
from .wl import (
    ColorAssignment,
    ComputationTree,
    blank_tree,
    computation_tree,
    stable_partition,
    wl_colors,
    wl_equivalent,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ColorAssignment",
    "ComputationTree",
    "DistortionReport",
    "FswGnnModel",
    "FswParams",
    "FwConvergenceError",
    "GraphCorpus",
    "GraphFormatError",
    "HolderFit",
    "LpError",
    "LpInfeasibleError",
    "LpIterationError",
    "LpProblem",
    "LpUnboundedError",
    "TransportPlan",
    "UpdateMap",
    "VertexFeaturedGraph",
    "assignment_min_cost",
    "augment_pad",
    "blank_tree",
    "computation_tree",
    "dirichlet_energy",
    "disjoint_union",
    "distortion_report",
    "ds_metric_l1",
    "ds_metric_l2",
    "embed_multiset",
    "enumerate_small_graphs",
    "gen_neighbors_match",
    "gen_transfer_graph",
    "graph_embedding",
    "holder_fit",
    "init_model",
    "load_corpus",
    "load_graph",
    "lp_solve",
    "mad",
    "node_embeddings",
    "quantile_cosine_integral",
    "relabel",
    "sample_params",
    "save_corpus",
    "save_graph",
    "stable_partition",
    "tmd",
    "tree_distance",
    "wasserstein_1d",
    "wl_colors",
    "wl_equivalent",
]
