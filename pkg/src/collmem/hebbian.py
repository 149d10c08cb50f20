"""Hebbian edge-weight learning restricted to existing hyperlinks."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import kernels
from .errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LearnConfig:
    lam: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError("similarity threshold must lie in [0, 1]")


def similarity(a, b):
    """min/max visit ratio of two nonnegative counts; 0 when both are 0."""
    if a < 0 or b < 0:
        raise ValueError("visit counts must be nonnegative")
    if a == 0 and b == 0:
        return 0.0
    return min(a, b) / max(a, b)


def weight_delta(a, b, lam=0.5):
    sim = similarity(a, b)
    return sim if sim > lam else 0.0


def learn(graph, cfg=LearnConfig(), threads=1):
    """Return ``graph`` with each edge weight set to the summed co-activation.

    The edge set and the series are untouched; only weights change.
    ``threads`` affects wall time, never the result.
    """
    w = kernels.hebbian_weights(graph.series, graph.edges, cfg.lam, threads=threads)
    logger.info(
        "learned %d edges over %d hours: %d positive",
        graph.n_edges, graph.horizon, int((w > 0).sum()),
    )
    return graph.with_weights(w)
