"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL/SKIP line that is printed in the terminal
summary (section "acceptance criteria").
"""

import os
import time

import numpy as np
import pytest
from sklearn.metrics import normalized_mutual_info_score

import oracles
from collmem import (
    LearnConfig,
    Pattern,
    RecallConfig,
    TemporalGraph,
    TimeWindow,
    _jit,
    activity_indicator,
    binarize,
    burstiness,
    learn,
    louvain,
    modularity,
    recall,
    recall_step,
    similarity,
    slice_window,
    weight_delta,
)
from collmem.evaluation import EvalConfig, error_curve, recall_difference
from collmem.export import export_gexf, read_gexf
from collmem.pipeline import learn_and_prune
from collmem.stats import powerlaw_exponent, sample_powerlaw
from collmem.synth import SynthConfig, generate


def _rel_close(a, b, rel=1e-12):
    return abs(a - b) <= rel * max(abs(b), 1e-300) or a == b


def test_c01_formula_oracles(criterion):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    bad = {"similarity": 0, "weight_delta": 0, "activity_indicator": 0, "burstiness": 0, "recall_step": 0}
    for _ in range(1000):
        a, b = (int(v) for v in rng.integers(0, 50, 2))
        lam = float(rng.choice([0.0, 0.25, 0.5, 0.75, rng.random()]))
        if not _rel_close(similarity(a, b), float(oracles.similarity(a, b))):
            bad["similarity"] += 1
        if not _rel_close(weight_delta(a, b, lam), float(oracles.weight_delta(a, b, lam))):
            bad["weight_delta"] += 1

        t_len = int(rng.integers(1, 40))
        x = np.where(rng.random(t_len) < 0.15, rng.integers(0, 5000, t_len), rng.poisson(3.0, t_len))
        n = float(rng.uniform(0.2, 6.0))
        k = oracles.indicator(x.tolist(), n)
        if activity_indicator(x, n).tolist() != k:
            bad["activity_indicator"] += 1
        if burstiness(x, n) != sum(k):
            bad["burstiness"] += 1

        nn = int(rng.integers(1, 8))
        pairs = rng.integers(0, nn, (int(rng.integers(0, 12)), 2))
        g = TemporalGraph.from_pairs([f"v{i}" for i in range(nn)], np.zeros((nn, 1), dtype=int), pairs)
        g = g.with_weights(rng.choice([0.0, 0.5, 1.0, 2.0, 7.25], g.n_edges))
        p = Pattern(rng.choice([-1, 1], (nn, int(rng.integers(1, 5)))), g.labels)
        theta = float(rng.choice([0.0, 0.5, -1.0]))
        if recall_step(g, p, theta).matrix.tolist() != oracles.recall_step(g.adjacency().toarray().tolist(), p.matrix.tolist(), theta):
            bad["recall_step"] += 1
    elapsed = time.perf_counter() - t0
    criterion.check(sum(bad.values()) == 0 and elapsed < 5.0, f"mismatches={bad} runtime={elapsed:.2f}s (<5s)")


def _random_graph(rng):
    n = int(rng.integers(2, 201))
    t_len = int(rng.integers(1, 501))
    m = int(rng.integers(0, min(2000, n * (n - 1) // 2) + 1))
    base = rng.poisson(rng.uniform(0, 20), (n, t_len))
    spikes = rng.random((n, t_len)) < 0.05
    series = np.where(spikes, rng.integers(0, 2000, (n, t_len)), base)
    g = TemporalGraph.from_pairs([f"v{i}" for i in range(n)], series, rng.integers(0, n, (m, 2)))
    return g


def _neighbor_map(g):
    out = {}
    for (i, j), w in zip(g.edges.tolist(), g.weights.tolist()):
        out.setdefault(i, {})[j] = w
        out.setdefault(j, {})[i] = w
    return out


def test_c02_learning_invariants(criterion):
    rng = np.random.default_rng(77)
    t0 = time.perf_counter()
    failures = []
    prev = _jit.backend()
    try:
        for case in range(100):
            g = _random_graph(rng)
            w = {}
            for name in ("numba", "numpy"):
                _jit.set_backend(name)
                for threads in (1, 8):
                    w[(name, threads)] = learn(g, LearnConfig(0.5), threads=threads)
            out = w[("numba", 1)]
            if len({v.weights.tobytes() for v in w.values()}) != 1:
                failures.append((case, "thread/backend dependence"))
            if not np.array_equal(out.edges, g.edges):
                failures.append((case, "edge set changed"))
            nb = _neighbor_map(out)
            csr = out.adjacency().toarray()
            if not np.array_equal(csr, csr.T) or any(nb[j][i] != wij for i in nb for j, wij in nb[i].items()):
                failures.append((case, "asymmetric"))
            if out.weights.size and not (out.weights.min() >= 0 and out.weights.max() <= g.horizon):
                failures.append((case, "weight bounds"))
            cut = int(rng.integers(0, g.horizon + 1))
            parts = np.zeros(g.n_edges)
            for lo, hi in ((0, cut), (cut, g.horizon)):
                if hi > lo:
                    parts += learn(slice_window(g, TimeWindow(lo, hi))).weights
            if g.n_edges and np.max(np.abs(parts - out.weights)) > 1e-9:
                failures.append((case, "window additivity"))
    finally:
        _jit.set_backend(prev)
    elapsed = time.perf_counter() - t0
    criterion.check(not failures and elapsed < 60.0, f"failures={failures[:5]} runtime={elapsed:.1f}s (<60s)")


def test_c03_cluster_recovery(criterion):
    t0 = time.perf_counter()
    nmi_ok = mod_ok = 0
    nmis, gains = [], []
    for seed in range(50):
        k = 3 + seed % 8
        cfg = SynthConfig(n_nodes=max(200, 30 * k), n_clusters=k, cluster_size=20, p_in=0.3, p_out=0.01, seed=seed)
        g, truth = generate(cfg)
        initial, pruned, ids = learn_and_prune(g, min_visits=500)
        part = louvain(pruned, 1.0, seed)
        nmi = normalized_mutual_info_score(truth.membership[ids], part.assignment)
        q_learned = modularity(pruned, part)
        topo = initial.adjacency(weighted=False)
        q_initial = modularity(topo, louvain(topo, 1.0, seed))
        nmis.append(nmi)
        gains.append((q_learned - q_initial) / abs(q_initial))
        nmi_ok += nmi >= 0.9
        mod_ok += q_learned > q_initial
    elapsed = time.perf_counter() - t0
    criterion.check(
        nmi_ok >= 0.95 * 50 and mod_ok == 50 and elapsed < 300,
        f"NMI>=0.9 in {nmi_ok}/50 (min {min(nmis):.3f}); Q_learned>Q_initial in {mod_ok}/50 "
        f"(mean gain {np.mean(gains):.1%}); runtime={elapsed:.1f}s (<300s)",
    )


def _single_cluster(seed):
    g, truth = generate(SynthConfig(n_nodes=100, n_clusters=1, cluster_size=30, seed=seed))
    _, pruned, ids = learn_and_prune(g, min_visits=500)
    cluster = np.flatnonzero(truth.membership[ids] == 0)
    return pruned, cluster, binarize(pruned), truth.events[0].start_hour


def test_c04_partial_pattern_recall(criterion):
    t0 = time.perf_counter()
    means = []
    for seed in range(5):
        g, cluster, pattern, start = _single_cluster(seed)
        cfg = EvalConfig((0.8,), trials=20, event_start=start, event_window=72, seed=seed)
        rep = error_curve(g, cluster, pattern, cfg, RecallConfig(0.0, 50))
        means.append(1.0 - rep.mean["event_window"][0.8])
    elapsed = time.perf_counter() - t0
    criterion.check(
        min(means) >= 0.9 and elapsed < 60,
        f"mean strict event-window A per seed {[round(m, 3) for m in means]} (>=0.9); runtime={elapsed:.1f}s (<60s)",
    )


def _monotone_with_one_inversion(errors, slack=0.02):
    rises = np.diff(errors)
    bad = rises[rises > 0]
    return len(bad) == 0 or (len(bad) == 1 and bad[0] <= slack)


def test_c05_error_curve_monotonicity(criterion):
    fractions = tuple(round(0.1 * i, 1) for i in range(1, 11))
    notes, ok = [], True
    for seed in range(5):
        g, cluster, pattern, start = _single_cluster(seed)
        rep = error_curve(g, cluster, pattern, EvalConfig(fractions, 20, start, 72, seed))
        event, full = rep.errors("event_window"), rep.errors("full_period")
        mono = _monotone_with_one_inversion(event) and _monotone_with_one_inversion(full)
        dominated = bool(np.all(event <= full + 1e-12))
        ok &= mono and dominated
        notes.append(f"s{seed}:mono={mono},event<=full={dominated}")
    criterion.check(ok, " ".join(notes))


def _monthly_run(seed, months=7, hours=720):
    rng = np.random.default_rng(seed + 1000)
    starts = tuple(int(m * hours + rng.integers(24, hours - 36)) for m in range(months))
    cfg = SynthConfig(n_nodes=250, n_clusters=months, cluster_size=20, hours=months * hours, event_starts=starts, seed=seed)
    g, _ = generate(cfg)
    full = binarize(g)
    for m in range(months):
        win = TimeWindow(m * hours, (m + 1) * hours)
        _, monthly, _ = learn_and_prune(slice_window(g, win), min_visits=500)
        if monthly.n_nodes == 0:
            return False
        diff = recall_difference(monthly, full)
        inside = diff[win.start_hour : win.end_hour]
        outside = np.concatenate([diff[: win.start_hour], diff[win.end_hour :]])
        if not (inside.sum() > 0 and outside.max() <= 0):
            return False
    return True


def test_c06_monthly_recall_locality(criterion):
    runs = 20
    passed = sum(_monthly_run(seed) for seed in range(runs))
    criterion.check(passed >= 0.95 * runs, f"locality held in {passed}/{runs} runs (>=95%)")


def test_c07_powerlaw_estimator(criterion):
    errs = {}
    for gamma in (2.2, 2.85, 3.81):
        x = sample_powerlaw(gamma, 100_000, 1.0, rng=int(gamma * 100))
        errs[gamma] = powerlaw_exponent(x, 1.0) - gamma
    criterion.check(all(abs(e) <= 0.05 for e in errs.values()), f"gamma error {({k: round(v, 4) for k, v in errs.items()})} (<=0.05)")


def test_c08_hopfield_degenerate_cases(criterion):
    rng = np.random.default_rng(8)
    counts = {"zero_w": 0, "fixed_point": 0, "cycles_seen": 0, "flag_errors": 0}
    for case in range(200):
        n = int(rng.integers(1, 30))
        cols = int(rng.integers(1, 10))
        labels = [f"u{i}" for i in range(n)]
        if case % 4 == 0 and n >= 3:
            # star with only the hub active oscillates between hub and leaves
            pairs = [(0, i) for i in range(1, n)]
        else:
            pairs = rng.integers(0, n, (int(rng.integers(0, 3 * n)), 2))
        g = TemporalGraph.from_pairs(labels, np.zeros((n, 1), dtype=int), pairs)
        g = g.with_weights(rng.choice([0.5, 1.0, 2.0], g.n_edges))
        p0 = Pattern(rng.choice([-1, 1], (n, cols)), g.labels)
        if case % 4 == 0 and n >= 3:
            m = -np.ones((n, cols), dtype=int)
            m[0] = 1
            p0 = p0.replace(m)

        zero = g.with_weights(np.zeros(g.n_edges))
        z = recall(zero, p0, RecallConfig(0.0, 50))
        if np.all(recall_step(zero, p0).matrix == -1) and np.all(z.pattern.matrix == -1):
            counts["zero_w"] += 1

        res = recall(g, p0, RecallConfig(0.0, 50))
        step = recall_step(g, res.pattern).matrix
        if res.iterations > 50:
            counts["flag_errors"] += 1
        if res.converged and not np.array_equal(step, res.pattern.matrix):
            counts["flag_errors"] += 1
        if res.cycle:
            counts["cycles_seen"] += 1
            back = recall_step(g, res.alternate).matrix
            if res.converged or not np.array_equal(step, res.alternate.matrix) or not np.array_equal(back, res.pattern.matrix):
                counts["flag_errors"] += 1
        if res.converged:
            again = recall(g, res.pattern)
            if again.iterations == 1 and again.converged:
                counts["fixed_point"] += 1
            else:
                counts["flag_errors"] += 1
        elif not res.cycle and res.iterations != 50:
            counts["flag_errors"] += 1
    ok = counts["zero_w"] == 200 and counts["flag_errors"] == 0 and counts["cycles_seen"] > 0 and counts["fixed_point"] > 0
    criterion.check(ok, f"{counts} over 200 instances")


def test_c09_export_round_trip(criterion):
    g, _ = generate(SynthConfig(n_nodes=200, n_clusters=4, seed=9))
    _, pruned, _ = learn_and_prune(g, min_visits=500)
    part = louvain(pruned, 1.0, 9)
    labels, edges, weights, comms = read_gexf(export_gexf(pruned, part))
    dw = float(np.max(np.abs(np.asarray(weights) - pruned.weights))) if weights else 0.0
    ok = (
        len(labels) == pruned.n_nodes
        and len(edges) == pruned.n_edges
        and dw <= 1e-9
        and comms == dict(zip(pruned.labels, part.assignment.tolist()))
    )
    criterion.check(ok, f"nodes {len(labels)}/{pruned.n_nodes} edges {len(edges)}/{pruned.n_edges} max|dw|={dw:.1e}")


def test_c10_full_dataset_stretch(criterion):
    path = os.environ.get("COLLMEM_FULL_DATASET")
    if not path:
        pytest.skip("stretch goal: set COLLMEM_FULL_DATASET to a snapshot of the published dataset")
    from collmem.snapshot import load_snapshot
    from collmem.preprocess import BurstConfig, filter_bursty_period
    from collmem.graph import prune
    from collmem.stats import graph_summary

    initial = filter_bursty_period(load_snapshot(path), BurstConfig())
    learned = learn(initial)
    share = float((learned.weights > 0).mean())
    pruned, _ = prune(learned)
    s0, s1 = graph_summary(initial), graph_summary(pruned)
    g0 = s0["degree_unweighted"]["gamma_mle"]
    g1 = s1["degree_weighted"]["gamma_mle"]
    c0, c1 = s0["communities"]["count"], s1["communities"]["count"]
    criterion.check(
        0.01 <= share <= 0.1 and g1 < g0 and c1 > 2 * c0,
        f"positive share {share:.3f} exponents {g0:.2f}->{g1:.2f} communities {c0}->{c1}",
    )
