"""Arm-selection policies driven by per-arm observation counts.

Three policies work on the qualitative feedback directly:

* Thompson Condorcet sampling (``tcs``) pulls the Condorcet winner of a
  joint Dirichlet posterior draw, redrawing while none exists.
* Thompson Borda sampling (``tbs``) pulls the Borda winner of one draw.
* Borda-UCB (``bucb``) compares optimistic Borda estimates and, when the
  optimistic arm is under-sampled, pulls every arm that is not among the
  most-pulled ones.

``DuelReduction`` wraps a classic dueling-bandit policy (``RUCB`` here):
each duel pulls two arms and compares their feedback.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from .core import InvalidArgumentError, as_probs, borda_scores, duel_sample, mu_matrix
from .sampling import RngState, sample_dirichlet_rows

PullDirective = List[int]


@dataclass
class ObservationCounts:
    """Feedback histogram per arm; ``counts[i, k-1]`` counts level ``k`` from arm ``i``."""

    counts: np.ndarray
    pulls: np.ndarray = field(init=False)
    round: int = field(init=False)

    def __post_init__(self):
        self.counts = np.array(self.counts, dtype=np.int64)
        if self.counts.ndim != 2 or np.any(self.counts < 0):
            raise InvalidArgumentError("counts must be a non-negative K x L matrix")
        self.pulls = self.counts.sum(axis=1)
        self.round = int(self.pulls.sum())

    @classmethod
    def zeros(cls, K: int, L: int) -> "ObservationCounts":
        return cls(np.zeros((K, L), dtype=np.int64))

    @property
    def K(self) -> int:
        return self.counts.shape[0]

    @property
    def L(self) -> int:
        return self.counts.shape[1]

    def empirical(self) -> np.ndarray:
        """Row-normalised counts; rows of never-pulled arms are left at zero."""
        n = np.maximum(self.pulls, 1)[:, None]
        return self.counts / n

    def copy(self) -> "ObservationCounts":
        return ObservationCounts(self.counts.copy())


def update_counts(state: ObservationCounts, arm: int, feedback: int) -> ObservationCounts:
    """Record one observation of level ``feedback`` from ``arm`` (in place)."""
    if not 0 <= arm < state.K:
        raise InvalidArgumentError(f"arm {arm} outside 0..{state.K - 1}")
    if not 1 <= feedback <= state.L:
        raise InvalidArgumentError(f"feedback level {feedback} outside 1..{state.L}")
    state.counts[arm, feedback - 1] += 1
    state.pulls[arm] += 1
    state.round += 1
    return state


@dataclass(frozen=True)
class TcsConfig:
    t0: int = 10
    resample_cap: int = 1000

    def __post_init__(self):
        if self.t0 < 1 or self.resample_cap < 1:
            raise InvalidArgumentError("t0 and resample_cap must be >= 1")


@dataclass(frozen=True)
class BucbConfig:
    alpha: float
    tau: int = 1

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidArgumentError("alpha must be positive")
        if self.tau < 1:
            raise InvalidArgumentError("tau must be >= 1")

    @classmethod
    def recommended(cls, K: int, epsilon_prime: float = 0.1, tau: int = 1) -> "BucbConfig":
        from .analysis import recommended_alpha

        alpha, _ = recommended_alpha(K, epsilon_prime)
        return cls(alpha=alpha, tau=tau)


def posterior_sample(state: ObservationCounts, rng: RngState) -> np.ndarray:
    """One Dirichlet(C + 1) draw per arm, stacked as a K x L matrix."""
    return sample_dirichlet_rows(state.counts + 1.0, rng)


def _condorcet_of_sample(mu: np.ndarray) -> int:
    ok = np.flatnonzero(np.all(mu >= 0.5, axis=1))
    return int(ok[0]) if ok.size else -1


def tcs_draw(state: ObservationCounts, cfg: TcsConfig, rng: RngState) -> Tuple[int, int, bool]:
    """Thompson Condorcet selection with bookkeeping.

    Returns ``(arm, sampling_rounds, capped)``. When ``resample_cap`` draws
    all lack a Condorcet winner, the arm with the most sampled pairwise
    wins in the last draw is returned and ``capped`` is True.
    """
    for attempt in range(1, cfg.resample_cap + 1):
        mu = mu_matrix(posterior_sample(state, rng))
        arm = _condorcet_of_sample(mu)
        if arm >= 0:
            return arm, attempt, False
    wins = (mu >= 0.5).sum(axis=1) - 1
    return int(np.argmax(wins)), cfg.resample_cap, True


def tcs_select(state: ObservationCounts, cfg: TcsConfig, rng: RngState) -> int:
    return tcs_draw(state, cfg, rng)[0]


def tbs_select(
    state: ObservationCounts,
    rng: RngState,
    pinned: Optional[Mapping[int, np.ndarray]] = None,
) -> int:
    """Thompson Borda selection: argmax of Borda scores of one posterior draw.

    ``pinned`` replaces the draws of the given arms by fixed distributions,
    which reproduces the known-arm scenario used in the worst-case analysis.
    """
    theta = posterior_sample(state, rng)
    if pinned:
        for arm, dist in pinned.items():
            theta[arm] = as_probs(dist)
    return int(np.argmax(borda_scores(mu_matrix(theta))))


def bucb_scores(state: ObservationCounts, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """Estimated Borda scores and confidence widths at the current round."""
    K = state.K
    b_hat = borda_scores(mu_matrix(state.empirical()))
    gamma = np.sqrt(alpha * math.log(state.round) / state.pulls)
    beta = gamma + (gamma.sum() - gamma) / (K - 1)
    return b_hat, beta


def bucb_select(state: ObservationCounts, cfg: BucbConfig) -> PullDirective:
    if state.round < 2 or np.any(state.pulls < 1):
        raise InvalidArgumentError("Borda-UCB needs every arm pulled and at least two rounds")
    b_hat, beta = bucb_scores(state, cfg.alpha)
    i_ucb = int(np.argmax(b_hat + beta))
    most = state.pulls == state.pulls.max()
    if most[i_ucb]:
        return [i_ucb]
    return [int(i) for i in np.flatnonzero(~most)]


class RUCB:
    """Relative upper confidence bound duel policy on pairwise win counts."""

    def __init__(self, K: int, alpha: float = 0.51):
        self.K = K
        self.alpha = alpha
        self.wins = np.zeros((K, K), dtype=np.int64)
        self.t = 1

    def upper_bounds(self) -> np.ndarray:
        n = self.wins + self.wins.T
        with np.errstate(divide="ignore", invalid="ignore"):
            u = self.wins / n + np.sqrt(self.alpha * math.log(self.t) / n)
        u[n == 0] = 1.0
        np.fill_diagonal(u, 0.5)
        return u

    def select_pair(self, rng: RngState) -> Tuple[int, int]:
        u = self.upper_bounds()
        candidates = np.flatnonzero(np.all(u >= 0.5, axis=1))
        if candidates.size == 0:
            candidates = np.arange(self.K)
        c = int(candidates[int(rng.next_uniform() * candidates.size)])
        # the arm most likely to beat c; c itself once every rival looks worse
        d = int(np.argmax(u[:, c]))
        return c, d

    def update(self, i: int, j: int, i_won: bool) -> None:
        self.t += 1
        if i == j:
            return
        if i_won:
            self.wins[i, j] += 1
        else:
            self.wins[j, i] += 1


def rucb_duel_select(duel_state: RUCB, rng: RngState) -> Tuple[int, int]:
    return duel_state.select_pair(rng)


def duel_reduction_select(duel_policy, state: ObservationCounts, rng: RngState) -> PullDirective:
    i, j = duel_policy.select_pair(rng)
    return [i, j]


# Policy objects used by the simulator. ``select`` returns a directive of
# arms to pull in order; ``observe`` is called after every pull.


class Policy:
    name = "policy"
    warmup = 0

    def reset(self, K: int, L: int) -> None:
        pass

    def select(self, state: ObservationCounts, rng: RngState) -> PullDirective:
        raise NotImplementedError

    def observe(self, arm: int, level: int, rng: RngState) -> None:
        pass

    def diagnostics(self) -> Dict[str, int]:
        return {}


class ThompsonCondorcet(Policy):
    name = "tcs"

    def __init__(self, t0: int = 10, resample_cap: int = 1000):
        self.cfg = TcsConfig(t0=t0, resample_cap=resample_cap)
        self.warmup = self.cfg.t0
        self.cap_hits = 0
        self.resamples = 0

    def reset(self, K, L):
        self.cap_hits = 0
        self.resamples = 0

    def select(self, state, rng):
        arm, rounds, capped = tcs_draw(state, self.cfg, rng)
        self.resamples += rounds - 1
        self.cap_hits += capped
        return [arm]

    def diagnostics(self):
        return {"resample_cap_hits": self.cap_hits, "resamples": self.resamples}


class ThompsonBorda(Policy):
    name = "tbs"

    def __init__(self, t0: int = 10):
        if t0 < 1:
            raise InvalidArgumentError("t0 must be >= 1")
        self.warmup = t0

    def select(self, state, rng):
        return [tbs_select(state, rng)]


class BordaUCB(Policy):
    name = "bucb"

    def __init__(self, alpha: Optional[float] = None, tau: int = 1, epsilon_prime: float = 0.1):
        self.alpha = alpha
        self.tau = tau
        self.epsilon_prime = epsilon_prime
        self.warmup = tau
        self.cfg: Optional[BucbConfig] = None
        self.explore_blocks = 0

    def reset(self, K, L):
        if self.alpha is None:
            self.cfg = BucbConfig.recommended(K, self.epsilon_prime, self.tau)
        else:
            self.cfg = BucbConfig(alpha=self.alpha, tau=self.tau)
        self.explore_blocks = 0

    def select(self, state, rng):
        directive = bucb_select(state, self.cfg)
        if state.pulls[directive[0]] != state.pulls.max():
            self.explore_blocks += 1
        return directive

    def diagnostics(self):
        return {"explore_blocks": self.explore_blocks}


class DuelReduction(Policy):
    """Runs a classic duel policy by pulling both duellists and comparing levels."""

    name = "duel-reduction"

    def __init__(self, duel_alpha: float = 0.51):
        self.duel_alpha = duel_alpha
        self.duel_policy: Optional[RUCB] = None
        self._pair: Tuple[int, ...] = ()
        self._levels: List[int] = []

    def reset(self, K, L):
        self.duel_policy = RUCB(K, self.duel_alpha)
        self._pair = ()
        self._levels = []

    def select(self, state, rng):
        directive = duel_reduction_select(self.duel_policy, state, rng)
        self._pair = tuple(directive)
        self._levels = []
        return directive

    def observe(self, arm, level, rng):
        self._levels.append(level)
        if len(self._levels) == 2:
            i, j = self._pair
            self.duel_policy.update(i, j, duel_sample(self._levels[0], self._levels[1], rng))


class FixedArm(Policy):
    """Always pulls one arm; a reference point for regret accounting."""

    name = "fixed"

    def __init__(self, arm: int):
        self.arm = arm

    def select(self, state, rng):
        return [self.arm]


POLICIES = {
    "tcs": ThompsonCondorcet,
    "tbs": ThompsonBorda,
    "bucb": BordaUCB,
    "duel-reduction": DuelReduction,
    "fixed": FixedArm,
}


def make_policy(name: str, **options) -> Policy:
    try:
        cls = POLICIES[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown policy {name!r}; choose from {sorted(POLICIES)}") from None
    return cls(**options)
