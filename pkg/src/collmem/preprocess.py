"""Burst detection and burstiness filtering of graph nodes."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

import numpy as np

from . import kernels
from .errors import ConfigError, WindowRangeError
from .graph import TimeWindow, slice_window


@dataclass(frozen=True)
class BurstConfig:
    n: float = 5.0
    min_burstiness: int = 5

    def __post_init__(self):
        if not self.n > 0:
            raise ConfigError("activity rate multiplier n must be > 0")
        if self.min_burstiness < 0:
            raise ConfigError("min_burstiness must be >= 0")


def activity_indicator(x, n):
    """1 where ``x[t] > n * std(x) + mean(x)``, else 0 (population std)."""
    x = np.asarray(x, dtype=np.int64)
    if x.ndim != 1 or x.size == 0:
        raise WindowRangeError("activity indicator needs a non-empty 1-d series")
    return kernels.burst_mask(x[None, :], n)[0].astype(np.int8)


def burstiness(x, n):
    return int(activity_indicator(x, n).sum())


def burstiness_all(series, n):
    """Per-row burstiness of an ``(N, T)`` series block."""
    series = np.asarray(series)
    if series.shape[1] == 0:
        raise WindowRangeError("empty window")
    return kernels.burst_mask(series, n).sum(axis=1)


def filter_bursty(graph, cfg=BurstConfig()):
    """Keep nodes whose burstiness is strictly above ``cfg.min_burstiness``."""
    if graph.n_nodes == 0:
        return graph
    b = burstiness_all(graph.series, cfg.n)
    sub, _ = graph.subgraph(b > cfg.min_burstiness)
    return sub


def month_windows(graph):
    """Calendar-month windows covering the graph horizon, clipped to it.

    Returns ``[(\"YYYY-MM\", TimeWindow), ...]``. Without a start timestamp
    the horizon is cut into consecutive 30-day blocks labeled ``M00``,
    ``M01``...
    """
    horizon = graph.horizon
    if graph.start is None:
        out = []
        for i, lo in enumerate(range(0, horizon, 720)):
            out.append((f"M{i:02d}", TimeWindow(lo, min(lo + 720, horizon))))
        return out
    out = []
    cur = graph.start
    y, m = cur.year, cur.month
    while True:
        lo = _hours_between(graph.start, datetime(y, m, 1, tzinfo=cur.tzinfo))
        y2, m2 = (y + 1, 1) if m == 12 else (y, m + 1)
        hi = _hours_between(graph.start, datetime(y2, m2, 1, tzinfo=cur.tzinfo))
        lo = max(lo, 0)
        if lo >= horizon:
            break
        out.append((f"{y:04d}-{m:02d}", TimeWindow(lo, min(hi, horizon))))
        y, m = y2, m2
    return out


def _hours_between(a, b):
    return int((b - a).total_seconds() // 3600)


def window_for_month(graph, month):
    for name, win in month_windows(graph):
        if name == month:
            return win
    raise WindowRangeError(f"month {month} not inside the graph horizon")


def bursty_mask_monthly(graph, cfg=BurstConfig()):
    """Node mask: bursty in at least one calendar month."""
    keep = np.zeros(graph.n_nodes, dtype=bool)
    for _, win in month_windows(graph):
        b = burstiness_all(graph.series[:, win.start_hour : win.end_hour], cfg.n)
        keep |= b > cfg.min_burstiness
    return keep


def filter_bursty_period(graph, cfg=BurstConfig(), mode="union"):
    """Burst filter for a multi-month graph.

    ``mode="union"`` keeps nodes that survive the filter in any month;
    ``mode="full"`` applies one filter over the whole horizon.
    """
    if mode == "full":
        return filter_bursty(graph, cfg)
    if mode != "union":
        raise ConfigError(f"unknown burst filter mode {mode!r}")
    sub, _ = graph.subgraph(bursty_mask_monthly(graph, cfg))
    return sub


def preprocess_month(graph, month, cfg=BurstConfig()):
    """Slice to one calendar month and filter by burstiness there."""
    return filter_bursty(slice_window(graph, window_for_month(graph, month)), cfg)
