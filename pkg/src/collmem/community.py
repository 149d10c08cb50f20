"""Louvain modularity optimization on weighted undirected graphs."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import kernels
from .errors import ShapeError, UndefinedModularityError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Partition:
    """Community id per node, dense ``0..C-1``."""

    assignment: np.ndarray
    resolution: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        if a.ndim != 1:
            raise ShapeError("assignment must be one-dimensional")
        if a.size:
            present = np.unique(a)
            if present[0] != 0 or present[-1] != len(present) - 1:
                raise ValueError("community ids must be dense 0..C-1")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    @property
    def n_communities(self):
        return int(self.assignment.max()) + 1 if self.assignment.size else 0

    def __len__(self):
        return len(self.assignment)

    def members(self, community):
        return np.flatnonzero(self.assignment == community)


def relabel_dense(labels):
    """Renumber labels to ``0..C-1`` in order of first appearance."""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.reshape(-1)]


def _as_csr(graph):
    if sparse.issparse(graph):
        m = sparse.csr_matrix(graph, dtype=np.float64)
    elif isinstance(graph, np.ndarray):
        m = sparse.csr_matrix(graph.astype(np.float64))
    else:
        m = graph.adjacency(weighted=True)
    m.sum_duplicates()
    m.sort_indices()
    return m


def modularity(graph, partition, resolution=1.0):
    """Weighted Newman modularity with resolution ``gamma``.

    ``graph`` is a :class:`TemporalGraph`, a scipy sparse matrix or a dense
    symmetric array. ``partition`` is a :class:`Partition` or label array.
    """
    adj = _as_csr(graph)
    labels = partition.assignment if isinstance(partition, Partition) else np.asarray(partition)
    if labels.shape != (adj.shape[0],):
        raise ShapeError("partition must cover every node")
    m2 = float(adj.sum())
    if m2 <= 0:
        raise UndefinedModularityError("graph has zero total edge weight")
    labels = relabel_dense(labels)
    coo = adj.tocoo()
    same = labels[coo.row] == labels[coo.col]
    inside = np.bincount(labels[coo.row[same]], coo.data[same], minlength=labels.max() + 1)
    k = np.asarray(adj.sum(axis=1)).ravel()
    tot = np.bincount(labels, k, minlength=labels.max() + 1)
    return float(np.sum(inside) / m2 - resolution * np.sum(tot * tot) / (m2 * m2))


def _aggregate(adj, comm, n_comm):
    coo = adj.tocoo()
    agg = sparse.coo_matrix(
        (coo.data, (comm[coo.row], comm[coo.col])), shape=(n_comm, n_comm)
    ).tocsr()
    agg.sum_duplicates()
    agg.sort_indices()
    return agg


def louvain(graph, resolution=1.0, seed=0, max_levels=100):
    """Multi-level Louvain partition, reproducible for a fixed ``seed``.

    Each level visits nodes in a seeded random order; the final assignment
    is renumbered densely by first appearance in node order.
    """
    adj = _as_csr(graph)
    n = adj.shape[0]
    m2 = float(adj.sum())
    if n == 0 or m2 <= 0:
        raise UndefinedModularityError("graph has zero total edge weight")
    rng = np.random.default_rng(seed)
    node_comm = np.arange(n, dtype=np.int64)
    level_adj = adj
    for level in range(max_levels):
        size = level_adj.shape[0]
        k = np.asarray(level_adj.sum(axis=1)).ravel()
        comm = np.arange(size, dtype=np.int64)
        order = rng.permutation(size)
        moves = kernels.local_move(
            level_adj.indptr.astype(np.int64),
            level_adj.indices.astype(np.int64),
            level_adj.data,
            k,
            order,
            comm,
            resolution,
            m2,
        )
        comm = relabel_dense(comm)
        n_comm = int(comm.max()) + 1
        logger.debug("louvain level %d: %d -> %d communities (%d moves)", level, size, n_comm, moves)
        node_comm = comm[node_comm]
        if moves == 0 or n_comm == size:
            break
        level_adj = _aggregate(level_adj, comm, n_comm)
    return Partition(relabel_dense(node_comm), resolution)


def community_sizes(partition):
    """Community cardinalities in descending order."""
    a = partition.assignment if isinstance(partition, Partition) else np.asarray(partition)
    if a.size == 0:
        return []
    return sorted(np.bincount(relabel_dense(a)).tolist(), reverse=True)
