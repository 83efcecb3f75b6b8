import numpy as np
import pytest

import qdb.simulator as sim
from qdb.core import InvalidArgumentError, preference_summary
from qdb.instances import borda_failure_instance, condorcet_k5_instance, dice_instance
from qdb.simulator import RunConfig, UnsupportedMetricError, aggregate, default_checkpoints, run_many, run_once

INST = borda_failure_instance()
GAPS = preference_summary(INST).gap_borda


def test_fixed_winner_has_zero_regret():
    tr = run_once(RunConfig(INST, "fixed", 500, {"arm": 0}))
    assert np.all(tr.regret_borda == 0) and np.all(tr.regret_condorcet == 0)


@pytest.mark.parametrize("arm", [1, 2])
def test_fixed_arm_regret_is_linear(arm):
    T = 1000
    tr = run_once(RunConfig(INST, "fixed", T, {"arm": arm}, checkpoints=[10, 100, T]))
    np.testing.assert_allclose(tr.regret_borda, np.array([10, 100, T]) * GAPS[arm], rtol=0, atol=1e-9)


@pytest.mark.parametrize("policy", ["tcs", "tbs", "bucb", "duel-reduction"])
def test_same_seed_same_trace(policy):
    cfg = RunConfig(INST, policy, 800, base_seed=3)
    a, b = run_once(cfg, 2), run_once(cfg, 2)
    assert a.seed == b.seed == 5
    np.testing.assert_array_equal(a.pulls, b.pulls)
    np.testing.assert_array_equal(a.regret_borda, b.regret_borda)


def test_different_replications_differ():
    cfg = RunConfig(INST, "tbs", 800)
    assert not np.array_equal(run_once(cfg, 0).pulls, run_once(cfg, 1).pulls)


def test_single_replication_aggregate():
    agg = run_many(RunConfig(INST, "tbs", 300, replications=1))
    np.testing.assert_array_equal(agg.borda_mean, agg.traces[0].regret_borda)
    assert np.all(agg.borda_std == 0)


def test_deterministic_policy_has_zero_spread():
    agg = run_many(RunConfig(INST, "fixed", 300, {"arm": 2}, replications=4))
    assert np.all(agg.borda_std == 0) and np.all(agg.condorcet_std == 0)


def test_population_std_and_percentiles():
    agg = run_many(RunConfig(INST, "tbs", 400, replications=5))
    m = agg.borda_matrix()
    np.testing.assert_allclose(agg.borda_std, m.std(axis=0, ddof=0))
    np.testing.assert_allclose(agg.percentile(50), np.median(m, axis=0))
    assert agg.at(400) == pytest.approx(m[:, -1].mean())


def test_parallel_matches_serial():
    cfg = dict(instance=INST, policy="tcs", horizon=400, replications=3, base_seed=7)
    serial = run_many(RunConfig(**cfg, workers=1))
    parallel = run_many(RunConfig(**cfg, workers=2))
    np.testing.assert_array_equal(serial.borda_mean, parallel.borda_mean)
    np.testing.assert_array_equal(serial.condorcet_std, parallel.condorcet_std)


def test_aggregate_ignores_completion_order():
    cfg = RunConfig(INST, "tbs", 300)
    traces = [run_once(cfg, r) for r in range(3)]
    np.testing.assert_array_equal(aggregate(traces).borda_mean, aggregate(traces[::-1]).borda_mean)


@pytest.mark.parametrize("policy", ["tcs", "tbs", "bucb", "duel-reduction"])
def test_conservation_monotonicity_and_identity(policy, monkeypatch):
    T = 1500
    inst = condorcet_k5_instance()
    s = preference_summary(inst)
    running = {"b": 0.0, "c": 0.0, "t": 0}
    seen = {}
    cps = default_checkpoints(T, 1, 20)
    real_update = sim.update_counts

    def recording_update(state, arm, level):
        running["b"] += s.gap_borda[arm]
        running["c"] += s.gap_condorcet[arm]
        running["t"] += 1
        if running["t"] in set(cps.tolist()):
            seen[running["t"]] = (running["b"], running["c"])
        return real_update(state, arm, level)

    monkeypatch.setattr(sim, "update_counts", recording_update)
    tr = run_once(RunConfig(inst, policy, T, checkpoints=cps))
    assert tr.final_pulls.sum() == T
    np.testing.assert_array_equal(tr.pulls.sum(axis=1), cps)
    assert np.all(np.diff(tr.regret_borda) >= 0) and np.all(np.diff(tr.regret_condorcet) >= 0)
    assert np.all(tr.regret_borda <= cps * s.gap_borda.max() + 1e-9)
    incremental = np.array([seen[t] for t in cps])
    np.testing.assert_allclose(tr.regret_borda, incremental[:, 0], rtol=0, atol=1e-9)
    np.testing.assert_allclose(tr.regret_condorcet, incremental[:, 1], rtol=0, atol=1e-9)


def test_explore_batch_truncated_at_horizon():
    # odd horizon with batched directives still stops exactly at T
    tr = run_once(RunConfig(INST, "bucb", 1001, {"alpha": 2.0}))
    assert tr.final_pulls.sum() == 1001


def test_warmup_counts_toward_regret():
    tr = run_once(RunConfig(INST, "tbs", 30, checkpoints=[30]))
    # the warm-up alone pulls each arm t0 = 10 times
    np.testing.assert_array_equal(tr.final_pulls, [10, 10, 10])
    assert tr.regret_borda[-1] == pytest.approx(10 * GAPS.sum())


def test_condorcet_metric_on_intransitive_instance():
    with pytest.raises(UnsupportedMetricError):
        RunConfig(dice_instance(), "tbs", 100, metrics=("condorcet",))
    cfg = RunConfig(dice_instance(), "tbs", 100)
    assert cfg.metrics == ("borda",)
    assert run_once(cfg).regret_condorcet is None


def test_tcs_diagnostics_reported():
    tr = run_once(RunConfig(dice_instance(), "tcs", 200, {"resample_cap": 3}))
    assert set(tr.diagnostics) == {"resample_cap_hits", "resamples"}


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(horizon=5),  # shorter than warm-up
        dict(horizon=100, replications=0),
        dict(horizon=100, checkpoints=[5, 5]),
        dict(horizon=100, checkpoints=[200]),
        dict(horizon=100, metrics=("copeland",)),
    ],
)
def test_invalid_configs(kwargs):
    with pytest.raises(InvalidArgumentError):
        RunConfig(INST, "tbs", **kwargs)


def test_default_checkpoints_end_at_horizon():
    cp = default_checkpoints(12345, 30)
    assert cp[0] == 30 and cp[-1] == 12345 and np.all(np.diff(cp) > 0)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("QDB_THREADS", "3")
    assert sim.worker_count() == 3
    monkeypatch.setenv("QDB_THREADS", "0")
    assert sim.worker_count() >= 1
    assert sim.worker_count(2) == 2
