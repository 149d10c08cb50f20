"""Binary activity patterns and synchronous Hopfield recall."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, NotFoundError, ShapeError
from .graph import TimeWindow


@dataclass(frozen=True, eq=False)
class Pattern:
    """Node x hour matrix of -1/+1 entries.

    ``labels[i]`` names row ``i``; ``window`` is the hour range the columns
    cover (``None`` for a zero-column pattern).
    """

    matrix: np.ndarray
    labels: tuple
    window: TimeWindow | None = None

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.int8)
        if m.ndim != 2 or m.shape[0] != len(self.labels):
            raise ShapeError(f"pattern shape {m.shape} does not match {len(self.labels)} labels")
        if m.size and not np.all((m == 1) | (m == -1)):
            raise ValueError("pattern entries must be -1 or +1")
        window = self.window
        if window is None and m.shape[1] > 0:
            window = TimeWindow(0, m.shape[1])
        if window is not None and window.length != m.shape[1]:
            raise ShapeError("window length does not match column count")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "window", window)

    @property
    def shape(self):
        return self.matrix.shape

    def replace(self, matrix):
        return Pattern(matrix, self.labels, self.window)

    def __eq__(self, other):
        return (
            isinstance(other, Pattern)
            and self.labels == other.labels
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None


@dataclass(frozen=True)
class RecallConfig:
    theta: float = 0.0
    max_iter: int = 50

    def __post_init__(self):
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")


@dataclass(frozen=True)
class RecallResult:
    pattern: Pattern
    iterations: int
    converged: bool
    cycle: bool = False
    # the other phase of a detected 2-cycle
    alternate: Pattern | None = None

    def stable(self):
        """Cells active in both phases of a 2-cycle; the pattern otherwise."""
        if self.alternate is None:
            return self.pattern
        both = (self.pattern.matrix == 1) & (self.alternate.matrix == 1)
        return self.pattern.replace(np.where(both, 1, -1))


def binarize(graph, n=5.0):
    """+1 where the node's burst indicator fires, -1 elsewhere."""
    if graph.horizon == 0:
        return Pattern(np.zeros((graph.n_nodes, 0), dtype=np.int8), graph.labels, None)
    mask = kernels.burst_mask(graph.series, n)
    return Pattern(np.where(mask, 1, -1).astype(np.int8), graph.labels)


def _check_aligned(graph, p):
    if p.shape[0] != graph.n_nodes:
        raise ShapeError(f"pattern has {p.shape[0]} rows, graph has {graph.n_nodes} nodes")


def recall_step(graph, p, theta=0.0, threads=1):
    """One synchronous update ``sign_theta(W @ p)`` (+1 iff field > theta)."""
    _check_aligned(graph, p)
    indptr, indices, data = graph.csr
    out = kernels.recall_step_kernel(indptr, indices, data, p.matrix, theta, threads)
    return p.replace(out)


def recall(graph, p0, cfg=RecallConfig(), threads=1):
    """Iterate :func:`recall_step` until a fixed point, a 2-cycle or ``max_iter``."""
    _check_aligned(graph, p0)
    indptr, indices, data = graph.csr
    prev = None
    cur = p0.matrix
    for it in range(1, cfg.max_iter + 1):
        nxt = kernels.recall_step_kernel(indptr, indices, data, cur, cfg.theta, threads)
        if np.array_equal(nxt, cur):
            return RecallResult(p0.replace(nxt), it, True)
        if prev is not None and np.array_equal(nxt, prev):
            return RecallResult(p0.replace(nxt), it, False, True, p0.replace(cur))
        prev, cur = cur, nxt
    return RecallResult(p0.replace(cur), cfg.max_iter, False)


def mask_pattern(p, keep):
    """Set every row outside ``keep`` (node ids) to -1."""
    keep = np.asarray(list(keep), dtype=np.int64)
    if keep.size and (keep.min() < 0 or keep.max() >= p.shape[0]):
        raise NotFoundError("mask refers to a node outside the pattern")
    m = np.full(p.shape, -1, dtype=np.int8)
    m[keep] = p.matrix[keep]
    return p.replace(m)


def write_pattern_csv(p, path):
    """CSV with a node-label header row; one row per hour."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(p.labels)
        w.writerows(p.matrix.T.tolist())


def read_pattern_csv(path, window=None):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ShapeError("pattern file is empty")
    labels = tuple(rows[0])
    body = [r for r in rows[1:] if r]
    if any(len(r) != len(labels) for r in body):
        raise ShapeError("ragged pattern file")
    m = np.array(body, dtype=np.int8).reshape(len(body), len(labels)).T
    return Pattern(m, labels, window)


def align_pattern(p, labels):
    """Reorder/subset rows of ``p`` to follow ``labels``."""
    index = {lab: i for i, lab in enumerate(p.labels)}
    try:
        rows = [index[lab] for lab in labels]
    except KeyError as exc:
        raise ShapeError(f"pattern lacks node {exc.args[0]!r}") from None
    return Pattern(p.matrix[rows], tuple(labels), p.window)
