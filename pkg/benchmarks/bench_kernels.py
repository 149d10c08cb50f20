"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --nodes 5000 --hours 2000 --degree 20
"""

import argparse
import statistics
import time

import numpy as np

from collmem import Pattern, TemporalGraph, _jit, learn, louvain, recall_step
from collmem.kernels import burst_mask


def make_graph(nodes, hours, degree, seed):
    rng = np.random.default_rng(seed)
    series = rng.poisson(5.0, (nodes, hours))
    spikes = rng.random((nodes, hours)) < 0.01
    series = np.where(spikes, rng.integers(100, 5000, (nodes, hours)), series)
    pairs = rng.integers(0, nodes, (nodes * degree // 2, 2))
    return TemporalGraph.from_pairs([f"n{i}" for i in range(nodes)], series, pairs)


def timeit(fn, repeat):
    fn()  # warm-up, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=2000)
    ap.add_argument("--hours", type=int, default=1000)
    ap.add_argument("--degree", type=int, default=20)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = make_graph(args.nodes, args.hours, args.degree, args.seed)
    learned = learn(g)
    rng = np.random.default_rng(args.seed)
    p = Pattern(rng.choice([-1, 1], (g.n_nodes, g.horizon)), g.labels)
    adj = learned.adjacency()

    kernels = {
        "burst_mask": lambda: burst_mask(g.series, 5.0),
        "hebbian": lambda: learn(g, threads=args.threads),
        "recall_step": lambda: recall_step(learned, p, 0.0, args.threads),
        "louvain": lambda: louvain(adj, 1.0, args.seed),
    }
    print(f"graph: {g.n_nodes} nodes, {g.n_edges} edges, {g.horizon} hours, threads={args.threads}")
    print(f"{'kernel':<12} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    prev = _jit.backend()
    try:
        for name, fn in kernels.items():
            res = {}
            for backend in ("numba", "numpy"):
                _jit.set_backend(backend)
                res[backend] = timeit(fn, args.repeat)
            print(f"{name:<12} {res['numba']:>10.4f} {res['numpy']:>10.4f} {res['numpy'] / res['numba']:>7.1f}x")
    finally:
        _jit.set_backend(prev)


if __name__ == "__main__":
    main()
