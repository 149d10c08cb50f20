"""End-to-end run: source -> preprocess -> learn -> prune -> communities -> stats."""

from __future__ import annotations

import csv
import json
import logging
import platform
import time
from pathlib import Path

import numpy as np

from . import __version__, _jit
from .community import louvain, modularity
from .errors import CollmemError, ConfigError
from .evaluation import EvalConfig, error_curve
from .export import export_gexf
from .hebbian import LearnConfig, learn
from .hopfield import RecallConfig, binarize
from .ingest import Grid, build_graph, filter_min_visits, parse_edges, parse_visits
from .graph import prune, slice_window
from .preprocess import BurstConfig, filter_bursty, filter_bursty_period, window_for_month
from .snapshot import save_snapshot
from .stats import graph_summary
from .synth import SynthConfig, generate

logger = logging.getLogger(__name__)

STAGE_EXIT_CODES = {
    "config": 2,
    "synth": 10,
    "ingest": 11,
    "preprocess": 12,
    "learn": 13,
    "prune": 14,
    "communities": 15,
    "stats": 16,
    "eval": 17,
    "export": 18,
}

DEFAULTS = {
    "source": "synth",
    "seed": "42",
    "threads": "1",
    "edges": "",
    "visits": "",
    "start": "2014-09-23T02:00",
    "hours": "5278",
    "min_visits": "500",
    "n": "5",
    "min_burstiness": "5",
    "burst_mode": "union",
    "window_month": "",
    "lambda": "0.5",
    "min_component_size": "3",
    "resolution": "1.0",
    "eval": "true",
    "fractions": "0.1..1.0",
    "trials": "20",
    "event_window": "72",
    "theta": "0",
    "max_iter": "50",
}


def learn_and_prune(
    graph,
    burst=BurstConfig(),
    learn_cfg=LearnConfig(),
    min_visits=None,
    min_component_size=3,
    threads=1,
):
    """Filter, learn and prune one window of ``graph``.

    Returns ``(initial, pruned, ids)``: the filtered graph before learning,
    the pruned learned graph, and for each pruned node its id in ``graph``.
    """
    g = graph if min_visits is None else filter_min_visits(graph, min_visits)
    initial = filter_bursty(g, burst)
    pruned, _ = prune(learn(initial, learn_cfg, threads=threads), min_component_size)
    ids = np.array([graph.node_id(lab) for lab in pruned.labels], dtype=np.int64)
    return initial, pruned, ids


class PipelineError(CollmemError):
    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause

    @property
    def exit_code(self):
        return STAGE_EXIT_CODES.get(self.stage, 1)


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def parse_fractions(text):
    """``"0.1..1.0"`` (step 0.1) or ``"0.2,0.5,1"``."""
    text = str(text).strip()
    if ".." in text:
        lo, hi = (float(v) for v in text.split(".."))
        steps = int(round((hi - lo) / 0.1))
        return tuple(round(lo + 0.1 * i, 10) for i in range(steps + 1))
    return tuple(float(v) for v in text.split(",") if v.strip())


def _truthy(value):
    return str(value).strip().lower() in {"1", "true", "yes", "on"}


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def write_partition_csv(path, labels, partition):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "community_id"])
        for lab, c in zip(labels, partition.assignment.tolist()):
            w.writerow([lab, c])


class _Stages:
    def __init__(self):
        self.records = []

    def run(self, name, fn):
        t0 = time.perf_counter()
        logger.info("stage %s", name)
        try:
            result, info = fn()
        except PipelineError:
            raise
        except (CollmemError, OSError, ValueError, KeyError) as exc:
            raise PipelineError(name, exc) from exc
        self.records.append({"name": name, "seconds": time.perf_counter() - t0, **info})
        return result


def run_pipeline(config, out_dir, overrides=None):
    """Execute every stage, writing snapshots and ``manifest.json`` to ``out_dir``.

    ``config`` is a path to a key=value file or a mapping; ``overrides``
    win over it. Raises :class:`PipelineError` tagged with the failing stage.
    """
    try:
        params = dict(DEFAULTS)
        params.update(read_config(config) if isinstance(config, (str, Path)) else dict(config))
        params.update(overrides or {})
        seed = int(params["seed"])
        threads = int(params["threads"])
        burst = BurstConfig(float(params["n"]), int(params["min_burstiness"]))
        learn_cfg = LearnConfig(float(params["lambda"]))
        min_comp = int(params["min_component_size"])
        resolution = float(params["resolution"])
        recall_cfg = RecallConfig(float(params["theta"]), int(params["max_iter"]))
    except (OSError, ValueError, KeyError) as exc:
        raise PipelineError("config", exc) from exc

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stages = _Stages()
    truth = None

    if params["source"] == "synth":
        synth_opts = {k[len("synth."):]: v for k, v in params.items() if k.startswith("synth.")}
        synth_opts.setdefault("seed", seed)

        def do_synth():
            nonlocal truth
            raw, truth = generate(SynthConfig.from_mapping(synth_opts))
            save_snapshot(raw, out / "00_source.snap")
            truth.write_csv(out / "truth.csv", raw.labels)
            g = filter_min_visits(raw, int(params["min_visits"]))
            truth = (dict(zip(raw.labels, truth.membership.tolist())), truth.events)
            info = {"outputs": ["00_source.snap", "truth.csv"], "nodes": g.n_nodes, "edges": g.n_edges}
            return g, info

        graph = stages.run("synth", do_synth)
    elif params["source"] == "files":

        def do_ingest():
            grid = Grid(params["start"], int(params["hours"]))
            with open(params["edges"], "rb") as fh:
                edges, estats = parse_edges(fh)
            with open(params["visits"], "rb") as fh:
                series, vstats = parse_visits(fh, grid)
            g = filter_min_visits(build_graph(edges, series, grid), int(params["min_visits"]))
            save_snapshot(g, out / "00_source.snap")
            info = {
                "outputs": ["00_source.snap"],
                "nodes": g.n_nodes,
                "edges": g.n_edges,
                "edge_lines_malformed": estats.malformed,
                "visit_rows_out_of_grid": vstats.out_of_grid,
            }
            return g, info

        graph = stages.run("ingest", do_ingest)
    else:
        raise PipelineError("config", f"unknown source {params['source']!r}")

    def do_preprocess():
        g = graph
        if params["window_month"]:
            g = filter_bursty(slice_window(g, window_for_month(g, params["window_month"])), burst)
        else:
            g = filter_bursty_period(g, burst, params["burst_mode"])
        save_snapshot(g, out / "01_preprocessed.snap")
        return g, {"outputs": ["01_preprocessed.snap"], "nodes": g.n_nodes, "edges": g.n_edges}

    initial = stages.run("preprocess", do_preprocess)

    def do_learn():
        g = learn(initial, learn_cfg, threads=threads)
        save_snapshot(g, out / "02_learned.snap")
        return g, {
            "outputs": ["02_learned.snap"],
            "positive_edges": int((g.weights > 0).sum()),
            "edges": g.n_edges,
        }

    learned = stages.run("learn", do_learn)

    def do_prune():
        g, old_ids = prune(learned, min_comp)
        save_snapshot(g, out / "03_pruned.snap", meta={"old_ids": old_ids.tolist()})
        return (g, old_ids), {"outputs": ["03_pruned.snap"], "nodes": g.n_nodes, "edges": g.n_edges}

    pruned, old_ids = stages.run("prune", do_prune)

    def do_communities():
        if pruned.n_edges == 0:
            raise ValueError("pruned graph is empty; nothing to partition")
        part = louvain(pruned, resolution, seed)
        write_partition_csv(out / "partition.csv", pruned.labels, part)
        info = {
            "outputs": ["partition.csv"],
            "count": part.n_communities,
            "modularity": modularity(pruned, part, resolution),
        }
        return part, info

    partition = stages.run("communities", do_communities)

    def do_stats():
        report = {
            "initial": graph_summary(initial, resolution, seed),
            "learned": graph_summary(pruned, resolution, seed),
        }
        mi = report["initial"].get("communities", {}).get("modularity")
        ml = report["learned"].get("communities", {}).get("modularity")
        if mi and ml is not None:
            report["modularity_gain"] = (ml - mi) / abs(mi)
        _write_json(out / "stats.json", report)
        return report, {"outputs": ["stats.json"], "modularity_gain": report.get("modularity_gain")}

    stages.run("stats", do_stats)

    if _truthy(params["eval"]) and truth is not None:

        def do_eval():
            membership, events = truth
            members = np.array([membership[lab] for lab in pruned.labels], dtype=np.int64)
            counts = np.bincount(members[members >= 0], minlength=len(events))
            if counts.sum() == 0:
                raise ValueError("no planted cluster survived pruning")
            c = int(np.argmax(counts))
            cluster = np.flatnonzero(members == c)
            cfg = EvalConfig(
                parse_fractions(params["fractions"]),
                int(params["trials"]),
                events[c].start_hour,
                int(params["event_window"]),
                seed,
            )
            pattern = binarize(pruned, burst.n)
            report = error_curve(pruned, cluster, pattern, cfg, recall_cfg, threads)
            _write_json(out / "eval.json", report.to_dict())
            return report, {"outputs": ["eval.json"], "cluster": c, "cluster_size": int(cluster.size)}

        stages.run("eval", do_eval)

    def do_export():
        with open(out / "learned.gexf", "wb") as fh:
            export_gexf(pruned, partition, fh)
        return None, {"outputs": ["learned.gexf"]}

    stages.run("export", do_export)

    manifest = {
        "package": "collmem",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "backend": _jit.backend(),
        "seed": seed,
        "parameters": dict(sorted(params.items())),
        "stages": stages.records,
    }
    _write_json(out / "manifest.json", manifest)
    return manifest
