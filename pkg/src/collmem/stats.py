"""Degree and weight distributions, power-law exponent fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, InsufficientDataError

MIN_POWERLAW_SAMPLES = 10


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    scale: str = "log"

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if len(counts) != len(edges) - 1:
            raise ValueError("need one more edge than bins")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly ascending")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def centers(self):
        if self.scale == "log":
            return np.sqrt(self.edges[:-1] * self.edges[1:])
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def density(self):
        """Counts normalized by bin width and total."""
        total = self.total
        if total == 0:
            return np.zeros(len(self.counts))
        return self.counts / (np.diff(self.edges) * total)

    def to_dict(self):
        return {"scale": self.scale, "edges": self.edges.tolist(), "counts": self.counts.tolist()}


def _int_log(x, base):
    k = math.floor(math.log(x) / math.log(base))
    # float log can land one off near exact powers
    while base**k > x:
        k -= 1
    while base ** (k + 1) <= x:
        k += 1
    return k


def log_histogram(samples, base=2.0):
    """Histogram of positive samples over bins ``[base**k, base**(k+1))``."""
    x = np.asarray(samples, dtype=np.float64)
    x = x[x > 0]
    if x.size == 0:
        raise EmptyInputError("no positive samples")
    lo = _int_log(float(x.min()), base)
    hi = _int_log(float(x.max()), base)
    edges = np.asarray([float(base) ** k for k in range(lo, hi + 2)])
    idx = np.searchsorted(edges, x, side="right") - 1
    counts = np.bincount(idx, minlength=len(edges) - 1)
    return Histogram(edges, counts, "log")


def linear_histogram(samples, bins=20):
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise EmptyInputError("no samples")
    counts, edges = np.histogram(x, bins=bins)
    return Histogram(edges, counts, "linear")


def degree_distribution(graph, weighted=True, base=2.0):
    """Log-binned histogram of (weighted) node degrees; zero degrees fall outside."""
    if graph.n_nodes == 0:
        raise EmptyInputError("graph has no nodes")
    return log_histogram(graph.degrees(weighted=weighted), base)


def weight_distribution(graph, base=2.0):
    if graph.n_edges == 0:
        raise EmptyInputError("graph has no edges")
    return log_histogram(graph.weights, base)


def powerlaw_exponent(samples, xmin=None):
    """Continuous maximum-likelihood exponent of ``p(x) ~ x**-gamma`` for x >= xmin."""
    x = np.asarray(samples, dtype=np.float64)
    x = x[x > 0]
    if xmin is None:
        if x.size == 0:
            raise InsufficientDataError("no positive samples")
        xmin = float(x.min())
    tail = x[x >= xmin]
    if tail.size < MIN_POWERLAW_SAMPLES:
        raise InsufficientDataError(
            f"{tail.size} samples >= xmin; at least {MIN_POWERLAW_SAMPLES} needed"
        )
    log_sum = float(np.sum(np.log(tail / xmin)))
    if log_sum <= 0:
        raise InsufficientDataError("all samples equal xmin; exponent diverges")
    return 1.0 + tail.size / log_sum


def powerlaw_exponent_regression(samples, xmin=None, base=2.0):
    """Exponent from a least-squares line through log-binned densities.

    Biased on binned data; kept for comparison with slope-read figures.
    """
    x = np.asarray(samples, dtype=np.float64)
    x = x[x > 0]
    if xmin is not None:
        x = x[x >= xmin]
    if x.size < MIN_POWERLAW_SAMPLES:
        raise InsufficientDataError("too few samples")
    h = log_histogram(x, base)
    dens = h.density()
    ok = dens > 0
    if ok.sum() < 2:
        raise InsufficientDataError("need at least two occupied bins")
    slope, _ = np.polyfit(np.log(h.centers[ok]), np.log(dens[ok]), 1)
    return float(-slope)


def sample_powerlaw(gamma, n, xmin=1.0, rng=None):
    """Inverse-CDF draws from a continuous power law."""
    rng = np.random.default_rng(rng)
    u = rng.random(n)
    return xmin * (1.0 - u) ** (-1.0 / (gamma - 1.0))


def graph_summary(graph, resolution=1.0, seed=0, base=2.0):
    """Structured report for one graph: distributions, exponents, communities."""
    from .community import community_sizes, louvain, modularity

    out = {"nodes": graph.n_nodes, "edges": graph.n_edges}
    if graph.n_nodes == 0:
        return out
    out["positive_weight_edges"] = int((graph.weights > 0).sum())
    for key, weighted in (("degree_weighted", True), ("degree_unweighted", False)):
        deg = graph.degrees(weighted=weighted)
        if not np.any(deg > 0):
            continue
        out[key] = {"histogram": log_histogram(deg, base).to_dict()}
        try:
            out[key]["gamma_mle"] = powerlaw_exponent(deg)
        except InsufficientDataError:
            out[key]["gamma_mle"] = None
    if out["positive_weight_edges"]:
        out["weights"] = {"histogram": weight_distribution(graph, base).to_dict()}
        w = graph.weights[graph.weights > 0]
        out["weights"]["mean"] = float(w.mean())
        out["weights"]["median"] = float(np.median(w))
    if graph.n_edges:
        # an unlearned graph (all weights 0) is scored on its bare topology
        weighted = out["positive_weight_edges"] > 0
        adj = graph.adjacency(weighted=weighted)
        part = louvain(adj, resolution, seed)
        out["communities"] = {
            "weighted": weighted,
            "resolution": resolution,
            "seed": seed,
            "count": part.n_communities,
            "modularity": modularity(adj, part, resolution),
            "sizes": community_sizes(part),
        }
    return out


def write_gnuplot(hist, path):
    """Two-column ``center count`` text file for gnuplot."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {hist.scale} bins: center count\n")
        for c, n in zip(hist.centers, hist.counts):
            fh.write(f"{c:.10g} {int(n)}\n")
