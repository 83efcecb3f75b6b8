"""Feedback distributions and the pairwise win-probability functional.

Feedback levels are the ordinal labels ``1..L`` with ``L`` the most
preferred. Distributions are stored as length-``L`` probability vectors
where index ``k - 1`` holds the mass of level ``k``. Arm indices are
zero-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

SIMPLEX_TOL = 1e-9
# slack on the Condorcet comparison so that exact 1/2 ties survive rounding
CONDORCET_TOL = 1e-12

ArrayLike = Union[Sequence[float], np.ndarray, "FeedbackDistribution"]


class InvalidArgumentError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class FeedbackDistribution:
    """Categorical distribution over the ordered levels ``1..L``."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.size < 1:
            raise InvalidArgumentError("a distribution needs at least one level")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise InvalidArgumentError(f"negative or non-finite probability in {p}")
        if abs(p.sum() - 1.0) > SIMPLEX_TOL:
            raise InvalidArgumentError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def L(self) -> int:
        return self.probs.size

    def __len__(self) -> int:
        return self.probs.size

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)


def as_probs(x: ArrayLike) -> np.ndarray:
    """Return the probability vector behind ``x`` without validation."""
    if isinstance(x, FeedbackDistribution):
        return x.probs
    return np.asarray(x, dtype=float)


def _check_same_length(x: np.ndarray, y: np.ndarray) -> None:
    if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
        raise InvalidArgumentError(
            f"distributions must share the same number of levels, got {x.shape} and {y.shape}"
        )


@dataclass(frozen=True)
class QdbInstance:
    """K arms, each with a feedback distribution on a common level set."""

    arms: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        arms = tuple(
            a if isinstance(a, FeedbackDistribution) else FeedbackDistribution(a)
            for a in self.arms
        )
        if len(arms) < 2:
            raise InvalidArgumentError("an instance needs at least two arms")
        if len({a.L for a in arms}) != 1:
            raise InvalidArgumentError("all arms must share the same number of levels")
        object.__setattr__(self, "arms", arms)

    @property
    def K(self) -> int:
        return len(self.arms)

    @property
    def L(self) -> int:
        return self.arms[0].L

    @property
    def probs(self) -> np.ndarray:
        """K x L matrix of arm distributions."""
        return np.vstack([a.probs for a in self.arms])

    def summary(self) -> "PreferenceSummary":
        return preference_summary(self)


def cumulative_weights(y: ArrayLike) -> np.ndarray:
    """Per-level value of beating a draw from ``y``.

    ``w[k] = P[Y < k+1] + P[Y = k+1] / 2``, so that ``win_prob(x, y)``
    is the dot product ``x @ w``.
    """
    y = as_probs(y)
    return np.cumsum(y, axis=-1) - 0.5 * y


def win_prob(x: ArrayLike, y: ArrayLike) -> float:
    """Probability that a draw from ``x`` beats a draw from ``y``, ties halved."""
    x, y = as_probs(x), as_probs(y)
    _check_same_length(x, y)
    return float(x @ cumulative_weights(y))


def mu_matrix(probs: np.ndarray) -> np.ndarray:
    """Pairwise win-probability matrix for the rows of ``probs``.

    The diagonal is set to exactly 1/2.
    """
    probs = np.asarray(probs, dtype=float)
    mu = probs @ cumulative_weights(probs).T
    np.fill_diagonal(mu, 0.5)
    return mu


def borda_scores(mu: np.ndarray) -> np.ndarray:
    K = mu.shape[0]
    return (mu.sum(axis=1) - 0.5) / (K - 1)


def condorcet_winner(mu: np.ndarray) -> Optional[int]:
    """Lowest-index arm whose win probability is >= 1/2 against every arm."""
    ok = np.all(mu >= 0.5 - CONDORCET_TOL, axis=1)
    idx = np.flatnonzero(ok)
    return int(idx[0]) if idx.size else None


@dataclass(frozen=True)
class PreferenceSummary:
    mu: np.ndarray
    borda: np.ndarray
    condorcet: Optional[int]
    borda_winner: int
    gap_condorcet: Optional[np.ndarray]
    gap_borda: np.ndarray

    @property
    def K(self) -> int:
        return self.mu.shape[0]


def preference_summary(instance: QdbInstance) -> PreferenceSummary:
    mu = mu_matrix(instance.probs)
    borda = borda_scores(mu)
    winner = condorcet_winner(mu)
    borda_winner = int(np.argmax(borda))
    gap_borda = np.maximum(borda[borda_winner] - borda, 0.0)
    gap_condorcet = None
    if winner is not None:
        gap_condorcet = np.maximum(mu[winner] - 0.5, 0.0)
        gap_condorcet[winner] = 0.0
    return PreferenceSummary(
        mu=mu,
        borda=borda,
        condorcet=winner,
        borda_winner=borda_winner,
        gap_condorcet=gap_condorcet,
        gap_borda=gap_borda,
    )


def duel_sample(i_feedback: int, j_feedback: int, rng) -> bool:
    """Outcome of comparing two observed levels; True when the first wins.

    Equal levels are settled by a fair coin drawn from ``rng``.
    """
    if i_feedback > j_feedback:
        return True
    if i_feedback < j_feedback:
        return False
    return rng.next_uniform() < 0.5
