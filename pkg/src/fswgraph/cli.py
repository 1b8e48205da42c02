"""Command-line interface.

Subcommands: gen, wl, embed, forward, metric, distortion, smoothness.  All
output is deterministic: JSON with stable key order and 17-significant-digit
floats, so identical invocations produce byte-identical bytes.

Exit codes: 0 success, 1 invalid input, 2 computation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import METRICS, dirichlet_energy, distortion_report, mad
from .ds_metric import ds_metric_l1, ds_metric_l2
from .fsw import embed_multiset, sample_params
from .gnn import graph_embedding, init_model, node_embeddings
from .graphs import (
    TRANSFER_TOPOLOGIES,
    GraphCorpus,
    VertexFeaturedGraph,
    gen_neighbors_match,
    gen_transfer_graph,
    load_corpus,
    load_graph,
    save_graph,
)
from .jsonutil import dumps_stable
from .tmd import MAX_TMD_DEPTH, tmd
from .wl import wl_colors, wl_equivalent

__all__ = ["main", "console_entry"]


class _CliInputError(ValueError):
    """Invalid command-line input or input file."""


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _CliInputError(f"cannot read {path}: {exc}") from exc


def _load_graph_file(path: str) -> VertexFeaturedGraph:
    return load_graph(_read_text(path))


def _load_corpus_file(path: str) -> GraphCorpus:
    return load_corpus(_read_text(path))


def _write_output(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text + "\n")
    else:
        Path(out).write_text(text + "\n")


def _default_width(num_vertices: int, dim: int) -> int:
    # Width that provably suffices for refinement-equivalent separation.
    return 2 * num_vertices * dim + 2


def _cmd_gen(args) -> int:
    if args.topology == "neighbors-match":
        g = gen_neighbors_match(args.radius)
    else:
        g = gen_transfer_graph(args.topology, args.radius)
    _write_output(save_graph(g), args.output)
    return 0


def _cmd_wl(args) -> int:
    g1 = _load_graph_file(args.graph)
    if args.other is None:
        assignment = wl_colors(g1, args.iterations if args.iterations is not None else g1.num_vertices)
        doc = {
            "colors": [list(row) for row in assignment.colors],
            "stable_after": assignment.first_stable_iteration(),
        }
    else:
        g2 = _load_graph_file(args.other)
        doc = {
            "equivalent": wl_equivalent(g1, g2),
            "iterations": max(g1.num_vertices, g2.num_vertices),
        }
    _write_output(dumps_stable(doc), args.output)
    return 0


def _cmd_embed(args) -> int:
    try:
        points = json.loads(_read_text(args.multiset))
    except json.JSONDecodeError as exc:
        raise _CliInputError(f"invalid JSON multiset: {exc}") from exc
    if not isinstance(points, list):
        raise _CliInputError("multiset file must hold a JSON array of vectors")
    arr = np.asarray(points, dtype=float)
    if arr.size and arr.ndim != 2:
        raise _CliInputError("multiset must be an array of equal-length vectors")
    dim = arr.shape[1] if arr.size else (args.dim or 1)
    params = sample_params(dim, args.hidden_dim, args.seed)
    vec = embed_multiset(arr if arr.size else np.zeros((0, dim)), params)
    _write_output(dumps_stable(list(vec)), args.output)
    return 0


def _cmd_forward(args) -> int:
    g = _load_graph_file(args.graph)
    width = args.hidden_dim or _default_width(g.num_vertices, g.feature_dim)
    iterations = args.iterations if args.iterations is not None else g.num_vertices
    model = init_model(g.feature_dim, width, iterations, args.seed, hidden=args.relu)
    doc = {
        "seed": args.seed,
        "width": width,
        "iterations": iterations,
        "embedding": list(graph_embedding(model, g)),
    }
    if args.nodes:
        doc["nodes"] = [[list(row) for row in h] for h in node_embeddings(model, g)]
    _write_output(dumps_stable(doc), args.output)
    return 0


def _metric_value(kind: str, norm: str, depth: int, tol: float, g1, g2) -> float:
    if kind == "ds":
        if norm == "l1":
            return ds_metric_l1(g1, g2)[0]
        return ds_metric_l2(g1, g2, tol=tol)
    return tmd(g1, g2, depth)


def _cmd_metric(args) -> int:
    if args.matrix:
        corpus = _load_corpus_file(args.graph)
        if args.other is not None:
            raise _CliInputError("--matrix takes a single corpus file")
        lines = ["i,j,value"]
        for i in range(len(corpus)):
            for j in range(i + 1, len(corpus)):
                v = _metric_value(
                    args.kind, args.norm, args.depth, args.tol,
                    corpus.graphs[i], corpus.graphs[j],
                )
                lines.append(f"{i},{j},{format(v, '.17g')}")
        _write_output("\n".join(lines), args.output)
        return 0
    if args.other is None:
        raise _CliInputError("metric needs two graph files (or --matrix with a corpus)")
    g1 = _load_graph_file(args.graph)
    g2 = _load_graph_file(args.other)
    value = _metric_value(args.kind, args.norm, args.depth, args.tol, g1, g2)
    doc: dict = {"metric": args.kind, "value": value}
    if args.kind == "ds":
        doc["norm"] = args.norm
    else:
        doc["depth"] = args.depth
    _write_output(dumps_stable(doc), args.output)
    return 0


def _cmd_distortion(args) -> int:
    corpus = _load_corpus_file(args.corpus)
    width = args.hidden_dim or _default_width(corpus.max_vertices, corpus.feature_dim)
    iterations = args.iterations if args.iterations is not None else corpus.max_vertices
    model = init_model(corpus.feature_dim, width, iterations, args.seed)
    report = distortion_report(
        corpus, model, metric=args.metric, depth=args.depth,
    )
    doc = report.to_dict()
    doc["width"] = width
    doc["iterations"] = iterations
    _write_output(dumps_stable(doc), args.output)
    if args.csv is not None:
        lines = ["i,j,ratio"]
        for (i, j), r in zip(report.pairs, report.ratios):
            lines.append(f"{i},{j},{format(r, '.17g')}")
        Path(args.csv).write_text("\n".join(lines) + "\n")
    return 0


def _cmd_smoothness(args) -> int:
    g = _load_graph_file(args.graph)
    width = args.hidden_dim or _default_width(g.num_vertices, g.feature_dim)
    iterations = args.iterations if args.iterations is not None else g.num_vertices
    model = init_model(g.feature_dim, width, iterations, args.seed)
    states = node_embeddings(model, g)
    doc = {
        "seed": args.seed,
        "width": width,
        "iterations": iterations,
        "dirichlet": [dirichlet_energy(h, g) for h in states],
        "mad": [mad(h, g) for h in states],
    }
    _write_output(dumps_stable(doc), args.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fswgraph",
        description="Multiset-embedding GNNs and WL-equivalent graph metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a benchmark graph")
    p.add_argument("--topology", required=True,
                   choices=list(TRANSFER_TOPOLOGIES) + ["neighbors-match"])
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("wl", help="color refinement / equivalence test")
    p.add_argument("graph")
    p.add_argument("other", nargs="?")
    p.add_argument("--iterations", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_wl)

    p = sub.add_parser("embed", help="embed a multiset of vectors")
    p.add_argument("multiset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden-dim", type=int, default=8)
    p.add_argument("--dim", type=int, help="vector dimension when the multiset is empty")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("forward", help="run the model on a graph")
    p.add_argument("graph")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden-dim", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--relu", action="store_true", help="one-hidden-layer update maps")
    p.add_argument("--nodes", action="store_true", help="include per-iteration vertex states")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_forward)

    p = sub.add_parser("metric", help="graph distance between two graphs")
    p.add_argument("kind", choices=["ds", "tmd"])
    p.add_argument("graph")
    p.add_argument("other", nargs="?")
    p.add_argument("--norm", choices=["l1", "l2"], default="l1")
    p.add_argument("--depth", type=int, default=4,
                   help=f"computation-tree depth for tmd (1..{MAX_TMD_DEPTH})")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--matrix", action="store_true",
                   help="treat the input as a corpus and emit a pairwise CSV")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_metric)

    p = sub.add_parser("distortion", help="distortion report over a corpus")
    p.add_argument("corpus")
    p.add_argument("--metric", choices=list(METRICS), default="ds_l1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden-dim", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--csv", help="also write per-pair ratios as CSV")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_distortion)

    p = sub.add_parser("smoothness", help="oversmoothing diagnostics per iteration")
    p.add_argument("graph")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden-dim", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_smoothness)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; map to the validation exit code.
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical/solver failures
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2


def console_entry() -> None:
    sys.exit(main())
