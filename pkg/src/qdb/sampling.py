"""Seeded randomness for environments and posterior sampling.

The generator is numpy's PCG64 seeded with a 64-bit integer. Streams are
reproducible within one numpy version; no cross-platform guarantee is made.
"""
from __future__ import annotations

import numpy as np

from .core import ArrayLike, FeedbackDistribution, InvalidArgumentError, as_probs


class RngState:
    """Single-owner random stream. Do not share one instance across runs."""

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self):
        return f"RngState(seed={self.seed})"

    def next_uniform(self) -> float:
        return float(self.generator.random())

    def spawn(self, offset: int) -> "RngState":
        """Independent stream for replication ``offset`` of a batch."""
        return RngState(replication_seed(self.seed, offset))


def replication_seed(base_seed: int, replication: int) -> int:
    return int(base_seed) + int(replication)


def sample_categorical(dist: ArrayLike, rng: RngState) -> int:
    """Inverse-CDF draw of a level in ``1..L``."""
    cdf = np.cumsum(as_probs(dist))
    return categorical_from_cdf(cdf, rng)


def categorical_from_cdf(cdf: np.ndarray, rng: RngState) -> int:
    u = rng.next_uniform() * cdf[-1]
    k = int(np.searchsorted(cdf, u, side="right"))
    return min(k, cdf.size - 1) + 1


def standard_gamma(shape, rng: RngState) -> np.ndarray:
    """Unit-scale gamma variates; shapes below one are supported."""
    return rng.generator.standard_gamma(shape)


def sample_dirichlet(alpha, rng: RngState) -> FeedbackDistribution:
    """Dirichlet draw built from normalised independent gamma variates."""
    return FeedbackDistribution(sample_dirichlet_rows(alpha, rng))


def sample_dirichlet_rows(alpha, rng: RngState) -> np.ndarray:
    """Dirichlet draws for every row of ``alpha`` (any leading shape).

    Returns a plain array; rows are normalised along the last axis.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.size == 0 or np.any(~(alpha > 0)):
        raise InvalidArgumentError("Dirichlet parameters must be positive")
    g = standard_gamma(alpha, rng)
    total = g.sum(axis=-1, keepdims=True)
    if np.any(total <= 0):
        # every variate underflowed; only possible with tiny shapes
        peak = (alpha == alpha.max(axis=-1, keepdims=True)).astype(float)
        g = np.where(total <= 0, peak, g)
        total = g.sum(axis=-1, keepdims=True)
    return g / total
