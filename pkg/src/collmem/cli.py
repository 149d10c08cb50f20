"""Command-line entry point: ``collmem <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .community import Partition, louvain, modularity
from .errors import CollmemError, NotFoundError
from .evaluation import EvalConfig, error_curve
from .export import export_gexf
from .graph import DEFAULT_MIN_COMPONENT_SIZE, prune
from .hebbian import LearnConfig, learn
from .hopfield import RecallConfig, align_pattern, binarize, read_pattern_csv, recall, write_pattern_csv
from .ingest import DEFAULT_HOURS, DEFAULT_MIN_VISITS, DEFAULT_START, Grid, build_graph, filter_min_visits, parse_edges, parse_visits
from .pipeline import (
    PipelineError,
    _write_json,
    parse_fractions,
    read_config,
    run_pipeline,
    write_partition_csv,
)
from .preprocess import BurstConfig, filter_bursty, filter_bursty_period, window_for_month
from .graph import slice_window
from .snapshot import load_snapshot, save_snapshot
from .stats import degree_distribution, graph_summary, weight_distribution, write_gnuplot
from .synth import SynthConfig, generate

logger = logging.getLogger("collmem")


def _setup_logging():
    level = os.environ.get("COLLMEM_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def cmd_synth(args):
    opts = read_config(args.config) if args.config else {}
    if args.seed is not None:
        opts["seed"] = args.seed
    graph, truth = generate(SynthConfig.from_mapping(opts))
    save_snapshot(graph, args.out)
    if args.truth:
        truth.write_csv(args.truth, graph.labels)
    print(json.dumps({"nodes": graph.n_nodes, "edges": graph.n_edges, "clusters": len(truth.events)}))


def cmd_ingest(args):
    grid = Grid(args.start, args.hours)
    with open(args.edges, "rb") as fh:
        edges, estats = parse_edges(fh)
    with open(args.visits, "rb") as fh:
        series, vstats = parse_visits(fh, grid)
    graph = filter_min_visits(build_graph(edges, series, grid), args.min_visits)
    save_snapshot(graph, args.out)
    print(json.dumps({
        "nodes": graph.n_nodes,
        "edges": graph.n_edges,
        "edge_lines_malformed": estats.malformed,
        "self_loops_dropped": estats.self_loops,
        "visit_rows_out_of_grid": vstats.out_of_grid,
        "visit_rows_malformed": vstats.malformed,
    }))


def cmd_preprocess(args):
    graph = load_snapshot(args.snapshot)
    cfg = BurstConfig(args.n, args.min_burstiness)
    if args.window_month:
        graph = filter_bursty(slice_window(graph, window_for_month(graph, args.window_month)), cfg)
    else:
        graph = filter_bursty_period(graph, cfg, args.mode)
    save_snapshot(graph, args.out)
    print(json.dumps({"nodes": graph.n_nodes, "edges": graph.n_edges, "horizon": graph.horizon}))


def cmd_learn(args):
    graph = learn(load_snapshot(args.snapshot), LearnConfig(args.lam), threads=args.threads)
    save_snapshot(graph, args.out)
    print(json.dumps({"edges": graph.n_edges, "positive_edges": int((graph.weights > 0).sum())}))


def cmd_prune(args):
    graph, old_ids = prune(load_snapshot(args.snapshot), args.min_component_size)
    save_snapshot(graph, args.out, meta={"old_ids": old_ids.tolist()})
    print(json.dumps({"nodes": graph.n_nodes, "edges": graph.n_edges}))


def read_partition_csv(path, graph):
    assignment = np.full(graph.n_nodes, -1, dtype=np.int64)
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            assignment[graph.node_id(row["label"])] = int(row["community_id"])
    if np.any(assignment < 0):
        raise NotFoundError("partition file does not cover every node")
    return Partition(assignment)


def cmd_communities(args):
    graph = load_snapshot(args.snapshot)
    part = louvain(graph, args.resolution, args.seed)
    write_partition_csv(args.out, graph.labels, part)
    print(json.dumps({
        "communities": part.n_communities,
        "modularity": modularity(graph, part, args.resolution),
    }))


def cmd_stats(args):
    graph = load_snapshot(args.snapshot)
    report = graph_summary(graph, args.resolution, args.seed)
    _write_json(args.report, report)
    if args.gnuplot_dir:
        d = Path(args.gnuplot_dir)
        d.mkdir(parents=True, exist_ok=True)
        write_gnuplot(degree_distribution(graph, weighted=False), d / "degree_unweighted.dat")
        if np.any(graph.weights > 0):
            write_gnuplot(degree_distribution(graph, weighted=True), d / "degree_weighted.dat")
            write_gnuplot(weight_distribution(graph), d / "weights.dat")


def cmd_recall(args):
    graph = load_snapshot(args.snapshot)
    if args.pattern:
        p0 = align_pattern(read_pattern_csv(args.pattern), graph.labels)
    else:
        p0 = binarize(graph, args.n)
    res = recall(graph, p0, RecallConfig(args.theta, args.max_iter), threads=args.threads)
    write_pattern_csv(res.pattern, args.out)
    print(json.dumps({"iterations": res.iterations, "converged": res.converged, "cycle": res.cycle}))


def _read_cluster(path, graph, cluster_id=None):
    ids = []
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and rows[0][0] == "label":
        header, rows = rows[0], rows[1:]
    else:
        header = None
    for row in rows:
        if not row:
            continue
        if header and "cluster" in header:
            c = int(row[header.index("cluster")])
            if c < 0 or (cluster_id is not None and c != cluster_id):
                continue
        try:
            ids.append(graph.node_id(row[0]))
        except NotFoundError:
            logger.warning("cluster node %r not in graph; skipped", row[0])
    return ids


def cmd_eval(args):
    graph = load_snapshot(args.snapshot)
    cluster = _read_cluster(args.cluster, graph, args.cluster_id)
    cfg = EvalConfig(parse_fractions(args.fractions), args.trials, args.event_start, args.window, args.seed)
    report = error_curve(graph, cluster, binarize(graph, args.n), cfg, RecallConfig(args.theta, args.max_iter), args.threads)
    _write_json(args.report, report.to_dict())


def cmd_export(args):
    graph = load_snapshot(args.snapshot)
    part = read_partition_csv(args.partition, graph) if args.partition else None
    with open(args.out, "wb") as fh:
        export_gexf(graph, part, fh)


def cmd_run(args):
    overrides = dict(kv.split("=", 1) for kv in args.set or [])
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.threads is not None:
        overrides["threads"] = str(args.threads)
    manifest = run_pipeline(args.config, args.out_dir, overrides)
    print(json.dumps({"stages": [s["name"] for s in manifest["stages"]]}))


def build_parser():
    p = argparse.ArgumentParser(prog="collmem", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate a planted-cluster dataset")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--truth")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("ingest", help="build a snapshot from edge/visit files")
    s.add_argument("--edges", required=True)
    s.add_argument("--visits", required=True)
    s.add_argument("--start", default=DEFAULT_START.isoformat(timespec="hours"))
    s.add_argument("--hours", type=int, default=DEFAULT_HOURS)
    s.add_argument("--min-visits", type=int, default=DEFAULT_MIN_VISITS)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("preprocess", help="burstiness filter")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--n", type=float, default=5.0)
    s.add_argument("--min-burstiness", type=int, default=5)
    s.add_argument("--window-month", help="YYYY-MM; slice to this month first")
    s.add_argument("--mode", choices=("union", "full"), default="union")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("learn", help="Hebbian edge weights")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--lambda", dest="lam", type=float, default=0.5)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("prune", help="drop zero-weight edges and small components")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--min-component-size", type=int, default=DEFAULT_MIN_COMPONENT_SIZE)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_prune)

    s = sub.add_parser("communities", help="Louvain partition")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--resolution", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_communities)

    s = sub.add_parser("stats", help="distribution report")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--report", required=True)
    s.add_argument("--resolution", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--gnuplot-dir")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("recall", help="Hopfield recall of a pattern")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--pattern", help="pattern CSV; default binarizes the snapshot series")
    s.add_argument("--n", type=float, default=5.0)
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--max-iter", type=int, default=50)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_recall)

    s = sub.add_parser("eval", help="masked-cluster recall error curve")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--cluster", required=True, help="CSV whose first column is a node label")
    s.add_argument("--cluster-id", type=int, help="with a truth CSV, evaluate only this cluster")
    s.add_argument("--fractions", default="0.1..1.0")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--event-start", type=int, required=True)
    s.add_argument("--window", type=int, default=72)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--n", type=float, default=5.0)
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--max-iter", type=int, default=50)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--report", required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("export", help="GEXF export")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--partition")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("run", help="full pipeline from a key=value config")
    s.add_argument("--config", required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--threads", type=int)
    s.add_argument("--set", action="append", metavar="KEY=VALUE")
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except PipelineError as exc:
        print(f"error: stage={exc.stage}: {exc.cause}", file=sys.stderr)
        return exc.exit_code
    except (CollmemError, OSError) as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0
