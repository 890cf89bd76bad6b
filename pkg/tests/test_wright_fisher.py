import numpy as np
import pytest

from fitdrift.errors import InvalidBinning, ValidationError
from fitdrift.wright_fisher import (
    SamplingPlan,
    Trajectory,
    WFConfig,
    bin_trajectory,
    block_edges,
    block_midpoints,
    downsample,
    lognormal_sizes,
    mutant_probability,
    sample_matrix,
    simulate,
    simulate_batch,
    trajectory_to_counts,
    wf_step,
)


def test_config_validation():
    for kw in ({"N": 0}, {"s": -0.1}, {"s": float("inf")}, {"generations": 0}, {"start_fraction": 1.5}):
        with pytest.raises(ValidationError):
            WFConfig(**kw)
    assert WFConfig(N=1000, start_fraction=0.05).start_count == 50
    assert WFConfig(N=3, start_fraction=0.5).start_count == 2


def test_update_rule():
    assert mutant_probability(500, 1000, 0.0) == pytest.approx(0.5)
    assert mutant_probability(500, 1000, 1.0) == pytest.approx(1000 / 1500)
    rng = np.random.default_rng(0)
    assert wf_step(0, 100, 0.5, rng) == 0
    assert wf_step(100, 100, 0.5, rng) == 100


def test_determinism_and_shape():
    cfg = WFConfig(N=100, s=0.02, generations=50)
    a = simulate(cfg, 7)
    b = simulate(cfg, 7)
    assert a == b and a.generations == 50 and a.counts[0] == 50
    m1 = simulate_batch(cfg, 20, np.random.default_rng(3))
    m2 = simulate_batch(cfg, 20, np.random.default_rng(3))
    assert m1.shape == (20, 50) and np.array_equal(m1, m2)
    assert m1.min() >= 0 and m1.max() <= 100


def test_absorbing_states_stay():
    m = simulate_batch(WFConfig(N=10, generations=300), 200, np.random.default_rng(1))
    for row in m:
        hits = np.flatnonzero((row == 0) | (row == 10))
        if len(hits):
            assert np.all(row[hits[0]:] == row[hits[0]])


def test_drift_mean_is_martingale():
    m = simulate_batch(WFConfig(N=200, generations=20), 20000, np.random.default_rng(5))
    # mean frequency drifts by less than a few standard errors
    assert abs(m[:, -1].mean() / 200 - 0.5) < 4 * 0.5 / np.sqrt(20000)


def test_selection_raises_frequency():
    m = simulate_batch(WFConfig(N=1000, s=0.05, generations=100, start_fraction=0.05), 500, np.random.default_rng(2))
    assert m[:, -1].mean() > m[:, 0].mean()


def test_blocks():
    assert block_edges(200, 4) == [(0, 50), (50, 100), (100, 150), (150, 200)]
    assert block_edges(200, 67)[-1] == (132, 200)
    assert list(block_midpoints(200, 4)) == [24.5, 74.5, 124.5, 174.5]
    with pytest.raises(InvalidBinning):
        block_edges(10, 11)


def test_bin_trajectory_pools_counts():
    traj = Trajectory(10, (0, 10, 5, 5))
    fs = bin_trajectory(traj, 2)
    assert fs.v == (0.5, 0.5)
    assert fs.token_total == (20, 20)
    fs = bin_trajectory(Trajectory(10, (0, 0, 10, 10)), 2)
    # smoothing keeps the endpoints inside (0, 1)
    assert fs.v == (1 / 21, 20 / 21)
    with pytest.raises(InvalidBinning):
        bin_trajectory(traj, 1)


def test_sampling():
    rng = np.random.default_rng(0)
    plan = lognormal_sizes(100, np.log(1.5), 200, 1000, rng)
    assert len(plan.sizes) == 200 and min(plan.sizes) >= 1 and max(plan.sizes) <= 1000
    assert plan.sigma_matches()
    assert SamplingPlan((5, 5), 0.0, 5, 0.0).sigma_matches()
    assert not SamplingPlan((5, 5), 0.5, 5, 0.1).sigma_matches()
    full = sample_matrix(np.array([[3, 7]]), 10, np.array([[10, 10]]), rng)
    assert full.tolist() == [[3, 7]]
    with pytest.raises(ValidationError):
        lognormal_sizes(2000, 0.1, 10, 1000, rng)
    with pytest.raises(ValidationError):
        sample_matrix(np.array([1]), 10, np.array([1]), rng, "poisson")


def test_downsample_and_counts():
    traj = simulate(WFConfig(N=100, generations=30), 1)
    plan = lognormal_sizes(20, 0.0, 30, 100, 1)
    fs = downsample(traj, plan, 2)
    assert len(fs) == 30 and set(fs.token_total) == {20}
    cs = trajectory_to_counts(traj, np.full(30, 50), 3, start_year=1900)
    assert cs.years[0] == 1900 and all(r.total == 50 for r in cs.records)
    with pytest.raises(ValidationError):
        downsample(traj, lognormal_sizes(20, 0.0, 29, 100, 1), 2)
