"""Undirected graph whose nodes carry hourly activity series.

Node ids are dense ``0..N-1``; edges are stored once as ``(i, j)`` with
``i < j``, sorted lexicographically, with one nonnegative weight each.
Arrays are frozen after construction so a graph can be shared by worker
threads without copying.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import NotFoundError, ShapeError, WindowRangeError

DEFAULT_MIN_COMPONENT_SIZE = 3


@dataclass(frozen=True)
class TimeWindow:
    """Half-open hour range ``[start_hour, end_hour)``."""

    start_hour: int
    end_hour: int

    def __post_init__(self):
        if self.start_hour < 0 or self.end_hour <= self.start_hour:
            raise WindowRangeError(f"malformed window [{self.start_hour}, {self.end_hour})")

    @property
    def length(self):
        return self.end_hour - self.start_hour

    def check(self, horizon):
        if self.end_hour > horizon:
            raise WindowRangeError(
                f"window [{self.start_hour}, {self.end_hour}) exceeds horizon {horizon}"
            )

    def clip(self, horizon):
        """Intersect with ``[0, horizon)``; ``None`` when nothing is left."""
        end = min(self.end_hour, horizon)
        if end <= self.start_hour:
            return None
        return TimeWindow(self.start_hour, end)


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


def canonical_edges(pairs, n_nodes=None):
    """Normalize an ``(E, 2)`` array of pairs to sorted unique ``i < j`` rows.

    Self-loops are dropped; reciprocal pairs collapse into one edge.
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    keep = lo != hi
    lo, hi = lo[keep], hi[keep]
    if n_nodes is not None and lo.size and (lo.min() < 0 or hi.max() >= n_nodes):
        raise NotFoundError("edge endpoint outside node range")
    out = np.unique(np.stack([lo, hi], axis=1), axis=0)
    return out.reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class TemporalGraph:
    labels: tuple
    series: np.ndarray
    edges: np.ndarray
    weights: np.ndarray = None
    start: datetime | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        series = np.asarray(self.series)
        if series.ndim != 2 or series.shape[0] != len(labels):
            raise ShapeError(
                f"series shape {series.shape} does not match {len(labels)} labels"
            )
        if series.size and series.min() < 0:
            raise ValueError("visit counts must be nonnegative")
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError("edges must be stored as i < j; use canonical_edges")
            if edges[:, 1].max() >= len(labels):
                raise NotFoundError("edge endpoint outside node range")
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            if np.any(order != np.arange(len(order))) or np.any(
                np.all(np.diff(edges, axis=0) == 0, axis=1)
            ):
                raise ValueError("edges must be sorted and unique; use canonical_edges")
        weights = self.weights
        if weights is None:
            weights = np.zeros(len(edges))
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (len(edges),):
            raise ShapeError("one weight per edge required")
        if weights.size and not np.all(weights >= 0):
            raise ValueError("edge weights must be nonnegative")
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != len(labels):
            raise ValueError("node labels must be unique")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "series", _frozen(series, np.int64))
        object.__setattr__(self, "edges", _frozen(edges, np.int64))
        object.__setattr__(self, "weights", _frozen(weights, np.float64))
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_pairs(cls, labels, series, pairs, weights=None, start=None):
        """Build from arbitrary (possibly reciprocal/unsorted) node-id pairs."""
        edges = canonical_edges(pairs, len(labels))
        if weights is not None:
            raise ValueError("weights can only be attached to canonical edges")
        return cls(labels, series, edges, None, start)

    @property
    def n_nodes(self):
        return len(self.labels)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def horizon(self):
        return self.series.shape[1]

    def node_id(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise NotFoundError(f"unknown node label {label!r}") from None

    def check_node(self, node):
        if not (0 <= int(node) < self.n_nodes):
            raise NotFoundError(f"node id {node} not in graph of {self.n_nodes} nodes")
        return int(node)

    def with_weights(self, weights):
        return TemporalGraph(self.labels, self.series, self.edges, weights, self.start)

    @cached_property
    def csr(self):
        """Symmetric adjacency as CSR arrays ``(indptr, indices, data)``.

        Neighbors of each row are in ascending id order.
        """
        n = self.n_nodes
        e = self.edges
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.concatenate([self.weights, self.weights])
        order = np.lexsort((cols, rows))
        rows, cols, data = rows[order], cols[order], data[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return (_frozen(indptr, np.int64), _frozen(cols, np.int64), _frozen(data, np.float64))

    def adjacency(self, weighted=True):
        indptr, indices, data = self.csr
        if not weighted:
            data = np.ones_like(data)
        return sparse.csr_matrix((data, indices, indptr), shape=(self.n_nodes, self.n_nodes))

    def degrees(self, weighted=True):
        if weighted:
            vals = self.weights
        else:
            vals = np.ones(self.n_edges)
        return np.bincount(self.edges[:, 0], vals, self.n_nodes) + np.bincount(
            self.edges[:, 1], vals, self.n_nodes
        )

    def subgraph(self, keep):
        """Induced subgraph on a boolean mask or id array.

        Returns ``(graph, old_ids)`` where ``old_ids[new] = old``.
        """
        keep = np.asarray(keep)
        if keep.dtype == bool:
            old_ids = np.flatnonzero(keep)
        else:
            old_ids = np.unique(keep.astype(np.int64))
        remap = np.full(self.n_nodes, -1, dtype=np.int64)
        remap[old_ids] = np.arange(len(old_ids))
        a = remap[self.edges[:, 0]]
        b = remap[self.edges[:, 1]]
        ok = (a >= 0) & (b >= 0)
        # endpoints stay ordered because remap is monotone
        edges = np.stack([a[ok], b[ok]], axis=1)
        sub = TemporalGraph(
            tuple(self.labels[i] for i in old_ids),
            self.series[old_ids],
            edges,
            self.weights[ok],
            self.start,
        )
        return sub, old_ids

    def time_of(self, hour):
        if self.start is None:
            return None
        return self.start + timedelta(hours=int(hour))

    def __repr__(self):
        return f"TemporalGraph(nodes={self.n_nodes}, edges={self.n_edges}, horizon={self.horizon})"


def neighbors(graph, node):
    """Adjacent ``(node_id, weight)`` pairs in ascending neighbor id."""
    node = graph.check_node(node)
    indptr, indices, data = graph.csr
    lo, hi = indptr[node], indptr[node + 1]
    return [(int(j), float(w)) for j, w in zip(indices[lo:hi], data[lo:hi])]


def slice_window(graph, window):
    """Restrict every series to ``window``; weights reset to zero."""
    window.check(graph.horizon)
    start = graph.time_of(window.start_hour)
    return TemporalGraph(
        graph.labels,
        graph.series[:, window.start_hour : window.end_hour],
        graph.edges,
        None,
        start,
    )


def prune(graph, min_component_size=DEFAULT_MIN_COMPONENT_SIZE):
    """Drop zero-weight edges, then isolated nodes, then small components.

    Returns ``(graph, old_ids)``; ``old_ids[new_id]`` is the id in the input.
    """
    positive = graph.weights > 0
    edges = graph.edges[positive]
    weights = graph.weights[positive]
    n = graph.n_nodes
    has_edge = np.zeros(n, dtype=bool)
    has_edge[edges.ravel()] = True
    if edges.size:
        adj = sparse.coo_matrix(
            (np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n)
        )
        _, comp = csgraph.connected_components(adj, directed=False)
        sizes = np.bincount(comp)
        keep = has_edge & (sizes[comp] >= min_component_size)
    else:
        keep = has_edge
    stripped = TemporalGraph(graph.labels, graph.series, edges, weights, graph.start)
    return stripped.subgraph(keep)
