"""Edge-list and visit-count parsers, graph assembly, visit filtering."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

from .errors import EmptyInputError, FormatError
from .graph import TemporalGraph, canonical_edges

logger = logging.getLogger(__name__)

DEFAULT_START = datetime(2014, 9, 23, 2)
DEFAULT_HOURS = 5278
DEFAULT_MIN_VISITS = 500


@dataclass(frozen=True)
class EdgeRecord:
    src_label: str
    dst_label: str


@dataclass(frozen=True)
class Grid:
    start: datetime
    hours: int

    def __post_init__(self):
        object.__setattr__(self, "start", normalize_hour(self.start))
        if self.hours < 1:
            raise ValueError("grid needs at least one hour")


@dataclass
class ParseStats:
    lines: int = 0
    records: int = 0
    malformed: int = 0
    self_loops: int = 0
    out_of_grid: int = 0


def normalize_hour(ts):
    """Naive UTC timestamp truncated to the hour."""
    if isinstance(ts, str):
        ts = datetime.fromisoformat(ts.strip().replace("Z", "+00:00"))
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
    return ts.replace(minute=0, second=0, microsecond=0)


def _text_lines(stream):
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    if isinstance(stream, io.TextIOBase):
        yield from stream
        return
    for raw in stream:
        yield raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw


def parse_edges(stream, fmt="tsv"):
    """Parse ``src<TAB>dst`` lines. Returns ``(records, stats)``.

    Comment lines (``#``) and blank lines are skipped. Self-references are
    dropped and counted; malformed lines are counted, and more than half
    malformed raises :class:`FormatError`.
    """
    if fmt != "tsv":
        raise FormatError(f"unsupported edge format {fmt!r}")
    stats = ParseStats()
    records = []
    for line in _text_lines(stream):
        line = line.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        stats.lines += 1
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            stats.malformed += 1
            continue
        if parts[0] == parts[1]:
            stats.self_loops += 1
            continue
        records.append(EdgeRecord(parts[0], parts[1]))
    stats.records = len(records)
    if stats.lines and stats.malformed * 2 > stats.lines:
        raise FormatError(f"{stats.malformed} of {stats.lines} edge lines malformed")
    if stats.malformed or stats.self_loops:
        logger.warning("edges: %d malformed, %d self-loops dropped", stats.malformed, stats.self_loops)
    return records, stats


def parse_visits(stream, grid):
    """Parse ``label,iso8601_hour,count`` rows onto an hourly grid.

    Returns ``({label: int64 array of length grid.hours}, stats)``.
    Duplicate (label, hour) rows are summed; rows outside the grid are
    dropped and counted.
    """
    stats = ParseStats()
    cells = {}
    reader = csv.reader(_text_lines(stream))
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if row[0].startswith("#"):
            continue
        stats.lines += 1
        if len(row) < 3:
            stats.malformed += 1
            continue
        # unquoted commas inside a title: the last two fields are fixed
        label = ",".join(row[:-2])
        try:
            ts = normalize_hour(row[-2])
            count = int(row[-1])
        except ValueError:
            if stats.lines == 1 and row[-1].strip().lower() == "count":
                stats.lines -= 1  # header row
                continue
            stats.malformed += 1
            continue
        if not label or count < 0:
            stats.malformed += 1
            continue
        offset = int((ts - grid.start) // timedelta(hours=1))
        if offset < 0 or offset >= grid.hours:
            stats.out_of_grid += 1
            continue
        cells.setdefault(label, {})
        cells[label][offset] = cells[label].get(offset, 0) + count
        stats.records += 1
    series = {}
    for label, by_hour in cells.items():
        x = np.zeros(grid.hours, dtype=np.int64)
        hrs = np.fromiter(by_hour.keys(), dtype=np.int64, count=len(by_hour))
        x[hrs] = np.fromiter(by_hour.values(), dtype=np.int64, count=len(by_hour))
        series[label] = x
    if stats.out_of_grid or stats.malformed:
        logger.warning("visits: %d outside grid, %d malformed", stats.out_of_grid, stats.malformed)
    return series, stats


def build_graph(edges, series, grid):
    """Assemble a zero-weight graph over every label that appears in an edge.

    Node ids follow sorted label order. Labels without visit data get an
    all-zero series; series of labels without edges are ignored.
    """
    labels = sorted({r.src_label for r in edges} | {r.dst_label for r in edges})
    if not labels:
        raise EmptyInputError("no nodes: edge list is empty")
    index = {lab: i for i, lab in enumerate(labels)}
    x = np.zeros((len(labels), grid.hours), dtype=np.int64)
    for lab, i in index.items():
        s = series.get(lab)
        if s is not None:
            if len(s) != grid.hours:
                raise ValueError(f"series for {lab!r} has length {len(s)}, grid has {grid.hours}")
            x[i] = s
    pairs = np.array([(index[r.src_label], index[r.dst_label]) for r in edges], dtype=np.int64)
    return TemporalGraph(tuple(labels), x, canonical_edges(pairs, len(labels)), None, grid.start)


def filter_min_visits(graph, threshold=DEFAULT_MIN_VISITS):
    """Keep nodes whose peak hourly visits exceed ``threshold`` (strictly)."""
    if graph.n_nodes == 0 or graph.horizon == 0:
        return graph.subgraph(np.zeros(graph.n_nodes, dtype=bool))[0]
    sub, _ = graph.subgraph(graph.series.max(axis=1) > threshold)
    return sub


def pagecounts_to_rows(stream, hour, project="en"):
    """Translate a raw hourly pagecounts dump into canonical visit rows.

    Dump lines read ``project title count bytes``; titles are kept as-is.
    Yields ``(label, iso_hour, count)``.
    """
    stamp = normalize_hour(hour).isoformat(timespec="hours")
    for line in _text_lines(stream):
        parts = line.rstrip("\n").split(" ")
        if len(parts) != 4 or parts[0] != project:
            continue
        try:
            count = int(parts[2])
        except ValueError:
            continue
        yield parts[1], stamp, count


def write_visit_rows(rows, fh):
    w = csv.writer(fh)
    for row in rows:
        w.writerow(row)
