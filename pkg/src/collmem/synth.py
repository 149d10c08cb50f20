"""Planted-cluster temporal graphs with known events, for ground-truth checks."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields
from datetime import datetime

import numpy as np

from .errors import ConfigError
from .graph import TemporalGraph, TimeWindow, canonical_edges

DEFAULT_START = datetime(2014, 9, 23, 2)


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters.

    Members of cluster ``c`` get Poisson(``amplitude``) visits during the
    event hours of ``c`` (each hour independently with probability
    ``participation``), ``isolated_spikes`` lone spikes at random hours,
    and Poisson(``baseline``) visits otherwise. Background nodes only see
    the baseline.
    """

    n_nodes: int = 200
    n_clusters: int = 3
    cluster_size: int = 20
    p_in: float = 0.3
    p_out: float = 0.01
    hours: int = 720
    event_length: int = 12
    event_starts: tuple | None = None
    # per-cluster override of event_length
    event_lengths: tuple | None = None
    baseline: float = 0.05
    amplitude: float = 1000.0
    participation: float = 0.8
    isolated_spikes: int = 2
    seed: int = 0
    start: datetime = DEFAULT_START

    def __post_init__(self):
        if self.event_starts is not None:
            object.__setattr__(self, "event_starts", tuple(int(s) for s in self.event_starts))
        if self.event_lengths is not None:
            object.__setattr__(self, "event_lengths", tuple(int(s) for s in self.event_lengths))
            if len(self.event_lengths) != self.n_clusters:
                raise ConfigError("one event length per cluster required")
            if any(k < 1 or k > self.hours for k in self.event_lengths):
                raise ConfigError("event lengths must be in [1, hours]")
        if not 0 <= self.p_out < self.p_in <= 1:
            raise ConfigError("need 0 <= p_out < p_in <= 1")
        if self.n_clusters < 0 or self.cluster_size < 1 and self.n_clusters:
            raise ConfigError("cluster count and size must be positive")
        if self.n_clusters * self.cluster_size > self.n_nodes:
            raise ConfigError("clusters do not fit in n_nodes")
        if self.event_length < 1 or self.event_length > self.hours:
            raise ConfigError("event_length must be in [1, hours]")
        if self.baseline < 0 or self.amplitude < 0:
            raise ConfigError("rates must be nonnegative")
        if not 0 < self.participation <= 1:
            raise ConfigError("participation must be in (0, 1]")
        if self.event_starts is not None:
            if len(self.event_starts) != self.n_clusters:
                raise ConfigError("one event start per cluster required")
            for s, k in zip(self.event_starts, self.lengths()):
                if s < 0 or s + k > self.hours:
                    raise ConfigError(f"event at hour {s} does not fit in the horizon")

    def lengths(self):
        if self.event_lengths is not None:
            return self.event_lengths
        return (self.event_length,) * self.n_clusters

    @classmethod
    def from_mapping(cls, mapping):
        """Build from string key/values, e.g. a parsed key=value file."""
        kinds = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in mapping.items():
            if key not in kinds:
                raise ConfigError(f"unknown synth option {key!r}")
            kind = kinds[key]
            if key in ("event_starts", "event_lengths"):
                kwargs[key] = tuple(int(v) for v in str(raw).split(",") if v.strip()) or None
            elif key == "start":
                kwargs[key] = raw if isinstance(raw, datetime) else datetime.fromisoformat(str(raw))
            elif kind == "int":
                kwargs[key] = int(raw)
            elif kind == "float":
                kwargs[key] = float(raw)
            else:
                kwargs[key] = raw
        return cls(**kwargs)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """``membership[i]`` is the planted cluster of node ``i`` or -1."""

    membership: np.ndarray
    events: tuple = field(default_factory=tuple)

    def cluster_nodes(self, c):
        return np.flatnonzero(self.membership == c)

    def write_csv(self, path, labels):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["label", "cluster", "event_start", "event_end"])
            for lab, c in zip(labels, self.membership):
                if c >= 0:
                    ev = self.events[c]
                    w.writerow([lab, int(c), ev.start_hour, ev.end_hour])
                else:
                    w.writerow([lab, -1, "", ""])


def default_event_starts(cfg, rng):
    """One event per cluster, each in its own equal slice of the horizon."""
    if cfg.n_clusters == 0:
        return ()
    slot = cfg.hours // cfg.n_clusters
    lengths = cfg.lengths()
    if slot < max(lengths):
        raise ConfigError("horizon too short for disjoint events")
    return tuple(
        int(c * slot + rng.integers(0, slot - k + 1)) for c, k in enumerate(lengths)
    )


def generate(cfg=SynthConfig()):
    """Return ``(TemporalGraph, GroundTruth)``; same config, same bytes."""
    rng = np.random.default_rng(cfg.seed)
    n, hours = cfg.n_nodes, cfg.hours
    membership = np.full(n, -1, dtype=np.int64)
    perm = rng.permutation(n)
    for c in range(cfg.n_clusters):
        membership[perm[c * cfg.cluster_size : (c + 1) * cfg.cluster_size]] = c

    iu, ju = np.triu_indices(n, k=1)
    same = (membership[iu] == membership[ju]) & (membership[iu] >= 0)
    prob = np.where(same, cfg.p_in, cfg.p_out)
    hit = rng.random(len(iu)) < prob
    edges = canonical_edges(np.stack([iu[hit], ju[hit]], axis=1), n)

    starts = cfg.event_starts if cfg.event_starts is not None else default_event_starts(cfg, rng)
    events = tuple(TimeWindow(s, s + k) for s, k in zip(starts, cfg.lengths()))

    series = rng.poisson(cfg.baseline, size=(n, hours)).astype(np.int64)
    for c, ev in enumerate(events):
        members = np.flatnonzero(membership == c)
        span = (len(members), ev.length)
        on = rng.random(span) < cfg.participation
        burst = rng.poisson(cfg.amplitude, size=span)
        block = series[members, ev.start_hour : ev.end_hour]
        series[members, ev.start_hour : ev.end_hour] = np.where(on, burst, block)
    if cfg.isolated_spikes:
        members = np.flatnonzero(membership >= 0)
        for i in members:
            hrs = rng.choice(hours, size=cfg.isolated_spikes, replace=False)
            series[i, hrs] = rng.poisson(cfg.amplitude, size=cfg.isolated_spikes)

    labels = tuple(f"page_{i:05d}" for i in range(n))
    graph = TemporalGraph(labels, series, edges, None, cfg.start)
    return graph, GroundTruth(membership, events)


def read_truth_csv(path):
    """Parse a truth/cluster CSV into ``{label: (cluster, event_start, event_end)}``."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            c = int(row["cluster"])
            s = row.get("event_start") or ""
            e = row.get("event_end") or ""
            out[row["label"]] = (c, int(s) if s else None, int(e) if e else None)
    return out
