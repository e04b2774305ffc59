import math

import numpy as np
import pytest
from scipy.stats import chi2_contingency, chisquare

from rumortree.laws import Binomial, Fixed, Geometric, Poisson
from rumortree.rumor_range import exact_tails, expected_range_exact
from rumortree.simulate import (ReplicaOutcome, SimConfig, contact_reduction, estimate,
                                simulate, simulate_ctmc)
from rumortree.spreader import build, conditional_table
from rumortree.streams import StreamFactory, replica_key, replica_stream
from rumortree.survival import survival

ENGINES = ("generation", "ctmc")


def _merged_table(a, b, min_expected=5):
    """Contingency table of two samples' reachedDepth, merging sparse upper bins."""
    top = max(a.max(), b.max()) + 1
    ca, cb = np.bincount(a, minlength=top), np.bincount(b, minlength=top)
    cols, acc = [], np.zeros(2, dtype=np.int64)
    for x, y in zip(ca, cb):
        acc += (x, y)
        if acc.sum() >= 2 * min_expected:
            cols.append(acc.copy())
            acc[:] = 0
    if acc.any():
        if cols:
            cols[-1] = cols[-1] + acc
        else:
            cols.append(acc)
    return np.array(cols).T


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(Fixed(2), engine="gillespie")
    with pytest.raises(ValueError):
        SimConfig(Fixed(2), max_depth=0)
    with pytest.raises(ValueError):
        SimConfig(Fixed(2), max_depth=5, survival_depth=6)
    assert SimConfig(Fixed(2), max_depth=7).survival_depth == 7


def test_streams():
    assert replica_key(1, 2) == (1 << 64) + 2
    f = StreamFactory(99)
    for i in (0, 1, 12345, 2 ** 40):
        a = f.stream(i).random(10)
        b = replica_stream(99, i).random(10)
        np.testing.assert_array_equal(a, b)
    assert not np.array_equal(replica_stream(99, 0).random(4), replica_stream(99, 1).random(4))
    assert not np.array_equal(replica_stream(98, 0).random(4), replica_stream(99, 0).random(4))


@pytest.mark.parametrize("engine", ENGINES)
@pytest.mark.parametrize("law", [Fixed(3), Binomial(4, 0.7), Poisson(2.8), Geometric(0.2)])
def test_replica_determinism(engine, law):
    cfg = SimConfig(law, engine, max_depth=8, replicas=1, seed=7)
    for i in (0, 5, 77):
        assert simulate(cfg, i) == simulate(cfg, i)
        assert simulate(cfg, i) == simulate(cfg, i, StreamFactory(7).stream(i))


@pytest.mark.parametrize("engine", ENGINES)
def test_outcome_invariants(engine):
    cfg = SimConfig(Poisson(2.7), engine, max_depth=9, survival_depth=5, seed=3)
    for i in range(300):
        out = simulate(cfg, i)
        assert isinstance(out, ReplicaOutcome)
        assert out.reached_depth == len(out.generation_counts) <= 9
        assert all(c > 0 for c in out.generation_counts)
        assert out.survived_proxy == (out.reached_depth >= 5)
        assert not out.truncated


@pytest.mark.parametrize("engine", ENGINES)
def test_leaf_law_never_spreads(engine):
    cfg = SimConfig(Fixed(0), engine, max_depth=5, replicas=200)
    assert estimate(cfg).reached.max() == 0


def test_ctmc_path_tail():
    # on a path each spreader passes the rumor on with probability 1/2
    cfg = SimConfig(Fixed(1), "ctmc", max_depth=30, replicas=20_000)
    s = estimate(cfg)
    tails = exact_tails(build(Fixed(1)), 4)
    np.testing.assert_allclose(s.range_tail()[:5], tails, atol=0.015)


def test_ctmc_event_cap_flags_truncation():
    cfg = SimConfig(Fixed(3), "ctmc", max_depth=30, replicas=50, max_events=20)
    s = estimate(cfg)
    assert s.truncated_count > 0
    out = simulate_ctmc(cfg, 0)
    assert out.events_processed <= 20


def test_contact_reduction_law(rng):
    d, n = 5, 60_000
    xs = np.array([contact_reduction(rng, d, 1) for _ in range(n)])
    obs = np.bincount(xs, minlength=d + 1)
    assert chisquare(obs, conditional_table(d) * n).pvalue > 1e-3


def test_grouped_reduction_mean(rng):
    d, c = 7, 5000
    tot = [contact_reduction(rng, d, c) for _ in range(200)]
    mean_x = float(np.dot(np.arange(d + 1), conditional_table(d)))
    assert np.mean(tot) / c == pytest.approx(mean_x, rel=5e-3)


def test_ctmc_root_law():
    n = 100_000
    cfg = SimConfig(Fixed(3), "ctmc", max_depth=1, replicas=n, seed=11)
    obs = np.bincount(estimate(cfg).root_spreaders, minlength=4)
    assert chisquare(obs, conditional_table(3) * n).pvalue > 0.01


def test_fixed2_dies_out():
    cfg = SimConfig(Fixed(2), "generation", max_depth=40, replicas=100_000)
    assert estimate(cfg).survival_estimate <= 0.01


@pytest.mark.parametrize("law", [Fixed(1), Binomial(3, 0.5)])
def test_engines_agree(law):
    a = estimate(SimConfig(law, "generation", max_depth=20, replicas=30_000, seed=5))
    b = estimate(SimConfig(law, "ctmc", max_depth=20, replicas=30_000, seed=6))
    assert chi2_contingency(_merged_table(a.reached, b.reached))[1] > 0.01


def test_mean_range_matches_exact():
    s = estimate(SimConfig(Binomial(3, 0.5), "generation", replicas=100_000))
    assert abs(s.mean_range - expected_range_exact(build(Binomial(3, 0.5)))) <= 1.96 * s.se_range


def test_subcritical_survival_interval():
    s = estimate(SimConfig(Binomial(3, 0.6), "generation", max_depth=40, replicas=20_000))
    lo, hi = s.survival_ci()
    assert lo == 0.0 or hi < 0.01


def test_poisson_survival_proxy():
    n = 20_000
    s = estimate(SimConfig(Poisson(3.0), "generation", max_depth=60, replicas=n))
    theta = survival(Poisson(3.0)).theta
    sd = math.sqrt(theta * (1 - theta) / n)
    assert abs(s.survival_estimate - theta) <= 3 * sd


def test_binomial_survival_proxy_ctmc():
    # shallower proxy keeps the supercritical trees small
    n = 4000
    s = estimate(SimConfig(Binomial(3, 0.95), "ctmc", max_depth=12, replicas=n))
    p12 = exact_tails(build(Binomial(3, 0.95)), 11)[11]
    sd = math.sqrt(p12 * (1 - p12) / n)
    assert abs(s.survival_estimate - p12) <= 3.5 * sd


def test_workers_do_not_change_results():
    cfg = SimConfig(Poisson(2.2), "generation", max_depth=15, replicas=3000, seed=42)
    a, b = estimate(cfg, workers=1), estimate(cfg, workers=3)
    np.testing.assert_array_equal(a.reached, b.reached)
    assert a.record() == b.record()


def test_summary_fields():
    s = estimate(SimConfig(Binomial(3, 0.5), "ctmc", max_depth=10, replicas=500))
    rec = s.record()
    for key in ("survivalEstimate", "ciLow", "ciHigh", "meanRange", "seRange", "replicas",
                "engine", "truncatedCount"):
        assert key in rec
    assert rec["ciLow"] <= rec["survivalEstimate"] <= rec["ciHigh"]
    assert s.range_pmf().sum() == pytest.approx(1.0)
    assert len(s.range_tail()) == 10
