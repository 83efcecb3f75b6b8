"""Regret simulation for qualitative dueling bandit policies."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .core import InvalidArgumentError, QdbInstance, preference_summary
from .policies import ObservationCounts, make_policy, update_counts
from .sampling import RngState, categorical_from_cdf, replication_seed

METRICS = ("condorcet", "borda")


class UnsupportedMetricError(InvalidArgumentError):
    """Condorcet regret was requested on an instance without a Condorcet winner."""


def default_checkpoints(horizon: int, start: int = 1, count: int = 30) -> np.ndarray:
    start = max(1, min(start, horizon))
    pts = np.unique(np.round(np.geomspace(start, horizon, count)).astype(np.int64))
    if pts[-1] != horizon:
        pts = np.append(pts, horizon)
    return pts


@dataclass
class RunConfig:
    instance: QdbInstance
    policy: str
    horizon: int
    policy_options: Dict = field(default_factory=dict)
    base_seed: int = 0
    replications: int = 1
    checkpoints: Optional[Sequence[int]] = None
    metrics: Optional[Sequence[str]] = None
    workers: Optional[int] = None

    def __post_init__(self):
        probe = make_policy(self.policy, **self.policy_options)
        K = self.instance.K
        if self.horizon < max(1, K * probe.warmup):
            raise InvalidArgumentError(
                f"horizon {self.horizon} shorter than the warm-up ({K} arms x {probe.warmup})"
            )
        if self.replications < 1:
            raise InvalidArgumentError("replications must be >= 1")
        if self.checkpoints is None:
            self.checkpoints = default_checkpoints(self.horizon, K * probe.warmup)
        cp = np.asarray(self.checkpoints, dtype=np.int64)
        if cp.ndim != 1 or cp.size == 0 or np.any(np.diff(cp) <= 0):
            raise InvalidArgumentError("checkpoints must be a non-empty strictly increasing list")
        if cp[0] < 1 or cp[-1] > self.horizon:
            raise InvalidArgumentError(f"checkpoints must lie in 1..{self.horizon}")
        self.checkpoints = cp
        has_condorcet = preference_summary(self.instance).condorcet is not None
        if self.metrics is None:
            self.metrics = METRICS if has_condorcet else ("borda",)
        for m in self.metrics:
            if m not in METRICS:
                raise InvalidArgumentError(f"unknown metric {m!r}")
        if "condorcet" in self.metrics and not has_condorcet:
            raise UnsupportedMetricError(
                f"instance {self.instance.name or '<unnamed>'} has no Condorcet winner; "
                "Condorcet regret is undefined"
            )
        self.metrics = tuple(self.metrics)


@dataclass
class RegretTrace:
    policy: str
    seed: int
    checkpoints: np.ndarray
    pulls: np.ndarray  # checkpoints x K pull counts
    regret_borda: np.ndarray
    regret_condorcet: Optional[np.ndarray]
    diagnostics: Dict[str, int]

    @property
    def final_pulls(self) -> np.ndarray:
        return self.pulls[-1]


def run_once(cfg: RunConfig, replication_index: int = 0) -> RegretTrace:
    instance = cfg.instance
    K, T = instance.K, cfg.horizon
    summary = preference_summary(instance)
    seed = replication_seed(cfg.base_seed, replication_index)
    rng = RngState(seed)
    policy = make_policy(cfg.policy, **cfg.policy_options)
    policy.reset(K, instance.L)

    cdfs = np.cumsum(instance.probs, axis=1)
    state = ObservationCounts.zeros(K, instance.L)
    checkpoints = cfg.checkpoints
    snapshots = np.zeros((len(checkpoints), K), dtype=np.int64)
    next_cp = 0

    def pull(arm):
        nonlocal next_cp
        level = categorical_from_cdf(cdfs[arm], rng)
        update_counts(state, arm, level)
        policy.observe(arm, level, rng)
        if next_cp < len(checkpoints) and state.round == checkpoints[next_cp]:
            snapshots[next_cp] = state.pulls
            next_cp += 1

    for _ in range(policy.warmup):
        for arm in range(K):
            if state.round < T:
                pull(arm)
    while state.round < T:
        for arm in policy.select(state, rng):
            if state.round >= T:
                break
            pull(arm)

    snapshots = snapshots.astype(float)
    regret_condorcet = None
    if "condorcet" in cfg.metrics:
        regret_condorcet = snapshots @ summary.gap_condorcet
    return RegretTrace(
        policy=cfg.policy,
        seed=seed,
        checkpoints=np.asarray(checkpoints).copy(),
        pulls=snapshots.astype(np.int64),
        regret_borda=snapshots @ summary.gap_borda,
        regret_condorcet=regret_condorcet,
        diagnostics=policy.diagnostics(),
    )


@dataclass
class RegretAggregate:
    policy: str
    checkpoints: np.ndarray
    traces: List[RegretTrace]
    borda_mean: np.ndarray
    borda_std: np.ndarray
    condorcet_mean: Optional[np.ndarray]
    condorcet_std: Optional[np.ndarray]

    @property
    def runs(self) -> int:
        return len(self.traces)

    def borda_matrix(self) -> np.ndarray:
        return np.vstack([tr.regret_borda for tr in self.traces])

    def condorcet_matrix(self) -> np.ndarray:
        if self.condorcet_mean is None:
            raise UnsupportedMetricError("no Condorcet regret was recorded")
        return np.vstack([tr.regret_condorcet for tr in self.traces])

    def percentile(self, q, metric: str = "borda") -> np.ndarray:
        m = self.borda_matrix() if metric == "borda" else self.condorcet_matrix()
        return np.percentile(m, q, axis=0)

    def at(self, t: int, metric: str = "borda") -> float:
        """Mean regret at checkpoint ``t``."""
        idx = np.flatnonzero(self.checkpoints == t)
        if idx.size == 0:
            raise KeyError(f"{t} is not a checkpoint")
        mean = self.borda_mean if metric == "borda" else self.condorcet_mean
        if mean is None:
            raise UnsupportedMetricError("no Condorcet regret was recorded")
        return float(mean[idx[0]])


def aggregate(traces: Sequence[RegretTrace]) -> RegretAggregate:
    """Mean and population standard deviation per checkpoint.

    Traces are summed in seed order (seed = base_seed + replication index),
    so the floating-point result does not depend on completion order.
    """
    traces = sorted(traces, key=lambda tr: tr.seed)
    if not traces:
        raise InvalidArgumentError("nothing to aggregate")
    b = np.vstack([tr.regret_borda for tr in traces])
    c_mean = c_std = None
    if traces[0].regret_condorcet is not None:
        c = np.vstack([tr.regret_condorcet for tr in traces])
        c_mean, c_std = c.mean(axis=0), c.std(axis=0)
    return RegretAggregate(
        policy=traces[0].policy,
        checkpoints=traces[0].checkpoints,
        traces=traces,
        borda_mean=b.mean(axis=0),
        borda_std=b.std(axis=0),
        condorcet_mean=c_mean,
        condorcet_std=c_std,
    )


def worker_count(requested: Optional[int] = None) -> int:
    """Parallel replication cap: explicit value, else ``QDB_THREADS`` (0 = all cores)."""
    n = requested
    if n is None:
        env = os.environ.get("QDB_THREADS")
        n = int(env) if env not in (None, "") else 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def _run_indexed(args):
    cfg, r = args
    return run_once(cfg, r)


def run_many(cfg: RunConfig) -> RegretAggregate:
    R = cfg.replications
    workers = min(worker_count(cfg.workers), R)
    jobs = [(cfg, r) for r in range(R)]
    if workers <= 1:
        traces = [_run_indexed(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_run_indexed, jobs))
    return aggregate(traces)
