"""Command-line entry points for the offline steps.

Subcommands: load-graph (validate and report), gen-fixture, build-index,
export-session, report, and serve. Data paths can also come from environment
variables mirroring the flags (CORPUSEL_GRAPH_NODES, CORPUSEL_GRAPH_EDGES,
CORPUSEL_CORPUS, CORPUSEL_INDEX_SNAPSHOT, CORPUSEL_PORT).
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import CorpuselError
from .index import build_index, load_snapshot, save_snapshot
from .ingest import FixtureMix, demo_graph, demo_mix, generate_fixture, parse_corpus
from .kb_graph import load_graph, serialize_graph
from .report import write_aggregate_report
from .service import ServiceConfig, load_engine, serve
from .session import export_corpus, effective_query, replay_session

_ENV = {
    "graph_nodes": "CORPUSEL_GRAPH_NODES",
    "graph_edges": "CORPUSEL_GRAPH_EDGES",
    "corpus": "CORPUSEL_CORPUS",
    "index_snapshot": "CORPUSEL_INDEX_SNAPSHOT",
    "port": "CORPUSEL_PORT",
}


def _resolve(args: argparse.Namespace, name: str, required: bool = False):
    value = getattr(args, name, None)
    if value is None and name in _ENV:
        value = os.environ.get(_ENV[name])
    if value is None and required:
        flag = "--" + name.replace("_", "-")
        raise CorpuselError(f"{flag} is required (or set {_ENV.get(name, flag)})")
    return value


def _load_graph_files(nodes_path: str, edges_path: str):
    with open(nodes_path, "r", encoding="utf-8") as nodes, \
            open(edges_path, "r", encoding="utf-8") as edges:
        return load_graph(nodes, edges)


def _cmd_load_graph(args) -> int:
    nodes_path = _resolve(args, "graph_nodes", required=True)
    edges_path = _resolve(args, "graph_edges", required=True)
    graph = _load_graph_files(nodes_path, edges_path)
    print(f"loaded {len(graph.categories)} categories, {len(graph.entities)} entities, "
          f"{graph.n_edges} edges")
    return 0


def _cmd_gen_fixture(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    nodes_path = _resolve(args, "graph_nodes")
    edges_path = _resolve(args, "graph_edges")
    if nodes_path and edges_path:
        graph = _load_graph_files(nodes_path, edges_path)
        mix = FixtureMix()
    else:
        # no graph given: use the built-in demo graph and write it next to the corpus
        graph = demo_graph()
        mix = demo_mix()
        nodes_text, edges_text = serialize_graph(graph)
        (out_dir / "nodes.tsv").write_text(nodes_text, encoding="utf-8")
        (out_dir / "edges.tsv").write_text(edges_text, encoding="utf-8")
        print(f"wrote {out_dir / 'nodes.tsv'} and {out_dir / 'edges.tsv'} (demo graph)")
    corpus_path = out_dir / "corpus.jsonl"
    truth_path = out_dir / "truth.json"
    n = generate_fixture(args.seed, args.docs, graph, mix, corpus_path, truth_path)
    print(f"wrote {n} documents to {corpus_path} (truth sidecar: {truth_path})")
    return 0


def _cmd_build_index(args) -> int:
    corpus_path = _resolve(args, "corpus", required=True)
    with open(corpus_path, "r", encoding="utf-8") as fh:
        docs, warnings = parse_corpus(fh)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    index = build_index(docs)
    save_snapshot(index, args.out)
    print(f"indexed {index.n_documents} documents, "
          f"{len(index.postings)} entities with mentions -> {args.out}")
    return 0


def _load_index(args):
    snapshot_path = _resolve(args, "index_snapshot")
    if snapshot_path:
        return load_snapshot(snapshot_path)
    corpus_path = _resolve(args, "corpus", required=True)
    with open(corpus_path, "r", encoding="utf-8") as fh:
        docs, _ = parse_corpus(fh)
    return build_index(docs)


def _replayed_session(args):
    graph = _load_graph_files(
        _resolve(args, "graph_nodes", required=True),
        _resolve(args, "graph_edges", required=True),
    )
    with open(args.audit, "r", encoding="utf-8") as fh:
        return replay_session(graph, fh)


def _cmd_export_session(args) -> int:
    state = _replayed_session(args)
    index = _load_index(args)
    content = export_corpus(state, index, include_unjudged=args.include_unjudged)
    Path(args.out).write_text(content, encoding="utf-8")
    n_docs = max(0, content.count("\n") - 1)
    print(f"exported {n_docs} documents to {args.out}")
    return 0


def _cmd_report(args) -> int:
    index = _load_index(args)
    if args.entities:
        entities = [e.strip() for e in args.entities.split(",") if e.strip()]
    elif args.entities_file:
        entities = [
            line.strip()
            for line in Path(args.entities_file).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
    elif args.audit:
        state = _replayed_session(args)
        entities = effective_query(state).sorted()
    else:
        raise CorpuselError("one of --entities, --entities-file, or --audit is required")
    written = write_aggregate_report(index, entities, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_serve(args) -> int:
    graph, index = load_engine(
        _resolve(args, "graph_nodes", required=True),
        _resolve(args, "graph_edges", required=True),
        corpus_path=_resolve(args, "corpus"),
        snapshot_path=_resolve(args, "index_snapshot"),
    )
    port = int(_resolve(args, "port") or 8000)
    config = ServiceConfig(ui_dir=args.ui_dir)
    print(f"serving {index.n_documents} documents, {len(graph.entities)} entities "
          f"on {args.host}:{port}")
    serve(graph, index, host=args.host, port=port, config=config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpusel",
        description="Entity-centric corpus selection engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_graph_flags(p):
        p.add_argument("--graph-nodes", dest="graph_nodes", help="nodes TSV file")
        p.add_argument("--graph-edges", dest="graph_edges", help="edges TSV file")

    p = sub.add_parser("load-graph", help="validate a graph and report its size")
    add_graph_flags(p)
    p.set_defaults(func=_cmd_load_graph)

    p = sub.add_parser("gen-fixture", help="generate a synthetic corpus with ground truth")
    add_graph_flags(p)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--docs", type=int, default=200)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_gen_fixture)

    p = sub.add_parser("build-index", help="index a corpus and write a snapshot")
    p.add_argument("--corpus", dest="corpus")
    p.add_argument("--out", required=True, help="snapshot file")
    p.set_defaults(func=_cmd_build_index)

    p = sub.add_parser("export-session", help="replay an audit log and export its corpus")
    add_graph_flags(p)
    p.add_argument("--audit", required=True, help="session audit JSONL file")
    p.add_argument("--corpus", dest="corpus")
    p.add_argument("--index-snapshot", dest="index_snapshot")
    p.add_argument("--include-unjudged", action="store_true")
    p.add_argument("--out", required=True, help="export file")
    p.set_defaults(func=_cmd_export_session)

    p = sub.add_parser("report", help="write aggregation tables and figures")
    add_graph_flags(p)
    p.add_argument("--corpus", dest="corpus")
    p.add_argument("--index-snapshot", dest="index_snapshot")
    p.add_argument("--entities", help="comma-separated entity ids")
    p.add_argument("--entities-file", help="file with one entity id per line")
    p.add_argument("--audit", help="derive the entity set from a session audit log")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="run the HTTP/JSON API")
    add_graph_flags(p)
    p.add_argument("--corpus", dest="corpus")
    p.add_argument("--index-snapshot", dest="index_snapshot")
    p.add_argument("--port", dest="port", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", dest="ui_dir", help="serve a built web UI from this directory")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CorpuselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
