"""Recall evaluation: masked-cluster error curves and monthly recall curves."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError, UndefinedAccuracyError
from .graph import TimeWindow
from .hopfield import RecallConfig, align_pattern, mask_pattern, recall

MODES = ("full_period", "event_window", "relaxed_window")


@dataclass(frozen=True)
class EvalConfig:
    mask_fractions: tuple = tuple(round(0.1 * i, 1) for i in range(1, 11))
    trials: int = 20
    event_start: int = 0
    event_window: int = 72
    seed: int = 7

    def __post_init__(self):
        object.__setattr__(self, "mask_fractions", tuple(float(f) for f in self.mask_fractions))
        if not self.mask_fractions or not all(0 < f <= 1 for f in self.mask_fractions):
            raise ConfigError("mask fractions must lie in (0, 1]")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.event_window < 1:
            raise ConfigError("event window must be >= 1 hour")
        if self.event_start < 0:
            raise ConfigError("event start must be >= 0")


@dataclass
class EvalReport:
    """Mean/std of ``1 - accuracy`` per kept fraction and error mode."""

    fractions: tuple
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    trials: int = 0
    cluster_size: int = 0
    event_window: tuple = ()
    meta: dict = field(default_factory=dict)

    def errors(self, mode):
        return np.array([self.mean[mode][f] for f in self.fractions])

    def to_dict(self):
        return {
            "fractions": list(self.fractions),
            "modes": {
                m: {
                    "mean": [self.mean[m][f] for f in self.fractions],
                    "std": [self.std[m][f] for f in self.fractions],
                }
                for m in MODES
            },
            "trials": self.trials,
            "cluster_size": self.cluster_size,
            "event_window": list(self.event_window),
            "meta": self.meta,
        }


def _cols(window, n_cols):
    if window is None:
        return slice(0, n_cols)
    return slice(window.start_hour, min(window.end_hour, n_cols))


def recall_accuracy(original, recalled, window=None, relaxed=False, rows=None):
    """Fraction of original +1 activations that are +1 after recall.

    ``window`` restricts columns (pattern-relative hours); ``rows`` restricts
    nodes. In relaxed mode a node counts once, as recovered when it has at
    least one +1 inside the window in both patterns.
    """
    if original.shape != recalled.shape:
        raise ShapeError("patterns are not aligned")
    cols = _cols(window, original.shape[1])
    a = original.matrix[:, cols] == 1
    b = recalled.matrix[:, cols] == 1
    if rows is not None:
        rows = np.asarray(list(rows), dtype=np.int64)
        a, b = a[rows], b[rows]
    if relaxed:
        active = a.any(axis=1)
        denom = int(active.sum())
        hits = int((active & b.any(axis=1)).sum())
    else:
        denom = int(a.sum())
        hits = int((a & b).sum())
    if denom == 0:
        raise UndefinedAccuracyError("no original activations in the evaluated range")
    return hits / denom


def kept_count(fraction, size):
    # round first so 0.3 * 10 is 3, not 4
    return min(size, max(1, math.ceil(round(fraction * size, 9))))


def _trial(graph, cluster, pattern, fi, fraction, trial, cfg, recall_cfg, event):
    rng = np.random.default_rng([cfg.seed, fi, trial])
    keep = rng.choice(cluster, size=kept_count(fraction, len(cluster)), replace=False)
    out = recall(graph, mask_pattern(pattern, np.sort(keep)), recall_cfg).pattern
    return (
        1.0 - recall_accuracy(pattern, out, None, False, cluster),
        1.0 - recall_accuracy(pattern, out, event, False, cluster),
        1.0 - recall_accuracy(pattern, out, event, True, cluster),
    )


def error_curve(graph, cluster, pattern, cfg=EvalConfig(), recall_cfg=RecallConfig(), threads=1):
    """Recall errors when only a random fraction of ``cluster`` stays active.

    ``cluster`` holds node ids of ``graph``; ``pattern`` is aligned with it.
    Every (fraction, trial) pair draws its subset from its own seeded stream,
    so results do not depend on ``threads``.
    """
    cluster = np.unique(np.asarray(list(cluster), dtype=np.int64))
    if cluster.size == 0:
        raise ConfigError("cluster must not be empty")
    if pattern.shape[0] != graph.n_nodes:
        raise ShapeError("pattern rows must match graph nodes")
    event = TimeWindow(cfg.event_start, cfg.event_start + cfg.event_window).clip(pattern.shape[1])
    if event is None:
        raise ConfigError("event window lies outside the pattern")
    jobs = [
        (fi, f, t) for fi, f in enumerate(cfg.mask_fractions) for t in range(cfg.trials)
    ]

    def run(job):
        fi, f, t = job
        return _trial(graph, cluster, pattern, fi, f, t, cfg, recall_cfg, event)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    res = np.array(results).reshape(len(cfg.mask_fractions), cfg.trials, 3)
    report = EvalReport(
        fractions=cfg.mask_fractions,
        trials=cfg.trials,
        cluster_size=int(cluster.size),
        event_window=(event.start_hour, event.end_hour),
        meta={"theta": recall_cfg.theta, "max_iter": recall_cfg.max_iter, "seed": cfg.seed},
    )
    for k, mode in enumerate(MODES):
        report.mean[mode] = {f: float(res[i, :, k].mean()) for i, f in enumerate(cfg.mask_fractions)}
        report.std[mode] = {f: float(res[i, :, k].std()) for i, f in enumerate(cfg.mask_fractions)}
    return report


def recall_difference(graph, full_pattern, recall_cfg=RecallConfig()):
    """Per-hour active count after recall minus before, over ``graph``'s nodes.

    Cells oscillating in a 2-cycle are counted as inactive.
    """
    p0 = align_pattern(full_pattern, graph.labels)
    out = recall(graph, p0, recall_cfg).stable()
    return (out.matrix == 1).sum(axis=0).astype(np.int64) - (p0.matrix == 1).sum(axis=0)


def monthly_recall_matrix(monthly_graphs, full_pattern, recall_cfg=RecallConfig()):
    """Stack of :func:`recall_difference` curves, one row per monthly graph.

    Each monthly graph's nodes must be a subset of the pattern's labels.
    """
    rows = [recall_difference(g, full_pattern, recall_cfg) for g in monthly_graphs]
    if not rows:
        return np.zeros((0, full_pattern.shape[1]), dtype=np.int64)
    return np.vstack(rows)
