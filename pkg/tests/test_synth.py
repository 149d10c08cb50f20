import numpy as np
import pytest

from collmem import kernels
from collmem.errors import ConfigError
from collmem.pipeline import learn_and_prune
from collmem.synth import SynthConfig, default_event_starts, generate, read_truth_csv


def test_same_seed_same_bytes():
    a, ta = generate(SynthConfig(seed=9))
    b, tb = generate(SynthConfig(seed=9))
    assert a.series.tobytes() == b.series.tobytes()
    assert a.edges.tobytes() == b.edges.tobytes()
    assert ta.membership.tobytes() == tb.membership.tobytes()
    assert ta.events == tb.events
    c, _ = generate(SynthConfig(seed=10))
    assert c.series.tobytes() != a.series.tobytes()


def test_structure():
    cfg = SynthConfig(n_nodes=100, n_clusters=3, cluster_size=20, seed=2)
    g, truth = generate(cfg)
    assert g.n_nodes == 100 and g.horizon == 720
    assert [len(truth.cluster_nodes(c)) for c in range(3)] == [20, 20, 20]
    assert (truth.membership == -1).sum() == 40
    ends = [(ev.start_hour, ev.end_hour) for ev in truth.events]
    for (s0, e0), (s1, _) in zip(ends, ends[1:]):
        assert e0 <= s1
    assert all(e - s == 12 for s, e in ends)
    assert g.labels[0] == "page_00000"


def test_event_hours_exceed_threshold():
    hits = []
    for seed in range(5):
        g, truth = generate(SynthConfig(participation=1.0, seed=seed))
        k = kernels.burst_mask(g.series, 5.0)
        for c, ev in enumerate(truth.events):
            hits.append(k[truth.cluster_nodes(c), ev.start_hour : ev.end_hour].ravel())
    assert np.concatenate(hits).mean() >= 0.99


def test_no_events_prunes_to_nearly_nothing():
    for seed in range(5):
        g, _ = generate(SynthConfig(amplitude=0.05, baseline=0.05, seed=seed))
        _, pruned, _ = learn_and_prune(g)
        assert pruned.n_nodes <= 0.05 * g.n_nodes


def test_event_lengths_override():
    g, truth = generate(SynthConfig(n_clusters=2, event_lengths=(3, 9), seed=1))
    assert [ev.length for ev in truth.events] == [3, 9]
    with pytest.raises(ConfigError):
        SynthConfig(n_clusters=2, event_lengths=(3,))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"p_in": 0.01, "p_out": 0.3},
        {"n_clusters": 20, "cluster_size": 20},
        {"event_length": 0},
        {"participation": 0.0},
        {"amplitude": -1},
        {"event_starts": (0, 10)},
        {"event_starts": (0, 10, 715)},
    ],
)
def test_invalid_config(kwargs):
    with pytest.raises(ConfigError):
        SynthConfig(**kwargs)


def test_horizon_too_short_for_events():
    cfg = SynthConfig(hours=30, n_clusters=3, event_length=12)
    with pytest.raises(ConfigError):
        default_event_starts(cfg, np.random.default_rng(0))


def test_from_mapping():
    cfg = SynthConfig.from_mapping(
        {"n_nodes": "60", "p_in": "0.5", "event_starts": "5,100", "n_clusters": "2", "start": "2015-01-01T00:00"}
    )
    assert cfg.n_nodes == 60 and cfg.p_in == 0.5 and cfg.event_starts == (5, 100)
    assert cfg.start.year == 2015
    with pytest.raises(ConfigError):
        SynthConfig.from_mapping({"bogus": "1"})


def test_truth_csv_round_trip(tmp_path):
    g, truth = generate(SynthConfig(n_nodes=50, n_clusters=2, seed=3))
    path = tmp_path / "truth.csv"
    truth.write_csv(path, g.labels)
    parsed = read_truth_csv(path)
    assert len(parsed) == 50
    for lab, c in zip(g.labels, truth.membership):
        got = parsed[lab]
        assert got[0] == c
        if c >= 0:
            assert got[1:] == (truth.events[c].start_hour, truth.events[c].end_hour)
        else:
            assert got[1:] == (None, None)
