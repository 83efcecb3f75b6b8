"""Information-theoretic quantities and regret-bound constants.

All logarithms are natural.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .core import (
    ArrayLike,
    FeedbackDistribution,
    InvalidArgumentError,
    QdbInstance,
    as_probs,
    preference_summary,
    win_prob,
)
from .sampling import RngState, sample_dirichlet_rows

GOLDEN = (1 + math.sqrt(5)) / 2


class InfeasibleError(ValueError):
    """No distribution can satisfy the requested win-probability constraint."""


def kl_divergence(p: ArrayLike, q: ArrayLike) -> float:
    """KL(p || q); ``inf`` when q puts zero mass where p does not."""
    p, q = as_probs(p), as_probs(q)
    if p.shape != q.shape or p.ndim != 1:
        raise InvalidArgumentError(f"shape mismatch {p.shape} vs {q.shape}")
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def kl_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise KL(p || q) for broadcastable arrays, 0 log 0 = 0."""
    p, q = np.broadcast_arrays(np.asarray(p, float), np.asarray(q, float))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * (np.log(p) - np.log(q)), 0.0)
    return terms.sum(axis=-1)


def binary_kl(x: float, y: float) -> float:
    """Bernoulli KL divergence d(x, y)."""
    if not 0 <= x <= 1 or not 0 <= y <= 1:
        raise InvalidArgumentError("binary_kl arguments must lie in [0, 1]")
    return kl_divergence([x, 1 - x], [y, 1 - y])


def c1(L: int) -> float:
    """Multinomial KL concentration constant."""
    return (2 * math.pi) ** (-(L - 1) / 2) * math.exp(L - 5 / 6)


def c1_prime(L: int) -> float:
    """Dirichlet KL concentration constant, ``2**L * c1(L)``."""
    return 2**L * c1(L)


def p_star(
    p_i: ArrayLike,
    p_winner: ArrayLike,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> Tuple[FeedbackDistribution, float]:
    """Closest distribution (in KL from ``p_i``) that ties or beats ``p_winner``.

    Solves ``min_P KL(p_i || P)`` subject to ``win_prob(P, p_winner) >= 1/2``
    through its one-dimensional dual. With ``d = w - 1/2`` for the cumulative
    weights ``w`` of ``p_winner``, stationary points have the form
    ``P_k = p_k / (1 - lam * d_k)`` and ``lam`` is found by bisection on
    ``sum_k P_k d_k = 0`` over ``[0, 1 / max_k d_k)``. If the root lies at the
    upper end, the leftover mass goes to the level maximising ``d``.

    Returns ``(P*, KL(p_i || P*))``.
    """
    p = FeedbackDistribution(as_probs(p_i)).probs.astype(float)
    q = FeedbackDistribution(as_probs(p_winner)).probs
    if p.shape != q.shape:
        raise InvalidArgumentError(f"shape mismatch {p.shape} vs {q.shape}")
    if win_prob(p, q) >= 0.5:
        return FeedbackDistribution(p), 0.0

    # d = w - 1/2 written as (mass below k - mass above k) / 2, which keeps
    # tiny tail masses that w - 1/2 would cancel away
    below = np.concatenate(([0.0], np.cumsum(q)[:-1]))
    above = np.concatenate((np.cumsum(q[::-1])[::-1][1:], [0.0]))
    d = (below - above) / 2
    d_max = float(d.max())
    k_star = int(np.argmax(d))
    if d_max < 0:
        raise InfeasibleError("no distribution reaches win probability 1/2 against p_winner")
    if d_max == 0:
        # only the top levels tie; all mass must sit on them
        top = d == 0
        if np.any(p[top] > 0):
            P = np.where(top, p, 0.0)
            P = P / P.sum()
        else:
            P = np.zeros_like(p)
            P[k_star] = 1.0
        return FeedbackDistribution(P), max(0.0, kl_divergence(p, P))

    support = p > 0
    r = d / d_max  # scale-free: bisection variable s = lam * d_max in [0, 1)

    # the constraint residual divided by d_max, so tol is relative to the
    # scale of the problem (d_max can be astronomically small)
    def residual(s):
        return float(np.sum(p[support] * r[support] / (1.0 - s * r[support])))

    lo, hi = 0.0, 1.0
    atom = not np.any(support & (r >= 1.0)) and residual(1.0) <= 0
    if atom:
        s = 1.0
    else:
        for _ in range(max_iter):
            s = 0.5 * (lo + hi)
            g = residual(s)
            if abs(g) <= tol or hi - lo <= 1e-17:
                break
            if g < 0:
                lo = s
            else:
                hi = s
    P = np.zeros_like(p)
    P[support] = p[support] / (1.0 - s * r[support])
    if atom:
        P[k_star] = max(0.0, 1.0 - P.sum())
    P = P / P.sum()
    return FeedbackDistribution(P), max(0.0, kl_divergence(p, P))


def recommended_alpha(K: int, epsilon_prime: float) -> Tuple[float, bool]:
    """Borda-UCB exploration coefficient; returns ``(alpha, undefined_flag)``.

    The formula has a ``K - 2`` denominator; for two arms 2.0 is returned
    with the flag set.
    """
    if not 0 < epsilon_prime < 1:
        raise InvalidArgumentError("epsilon_prime must lie in (0, 1)")
    if K < 2:
        raise InvalidArgumentError("need at least two arms")
    if K == 2:
        return 2.0, True
    e = epsilon_prime
    value = 3 * (1 + 3 * e) ** 2 / (2 * (1 - e) ** 2) * ((K - 1) / (K - 2)) ** 2
    return max(2.0, value), False


def lemma7_f(C: float, eps: float, delta: float, L: int) -> Tuple[float, bool]:
    """Sample size beyond which ``C n^L exp(-n eps) <= delta``.

    Returns ``(value, degenerate)``; when ``log(C/delta)/eps <= 1`` the
    squared-log term is dropped and ``degenerate`` is True.
    """
    if C <= 0 or eps <= 0 or not 0 < delta <= 1:
        raise InvalidArgumentError("need C > 0, eps > 0 and delta in (0, 1]")
    first = math.log(C / delta) / eps
    if first <= 1:
        return max(first, 0.0), True
    second = GOLDEN * (2 * L**2 / eps**2) * math.log(first) ** 2
    return first + second, False


@dataclass(frozen=True)
class BoundsConfig:
    epsilon: float = 0.1
    epsilon_prime: float = 0.1
    delta: float = 0.15
    tolerance: float = 1e-12

    def __post_init__(self):
        if min(self.epsilon, self.epsilon_prime, self.tolerance) <= 0:
            raise InvalidArgumentError("epsilon, epsilon_prime and tolerance must be positive")
        if not 0 < self.delta < 1:
            raise InvalidArgumentError("delta must lie in (0, 1)")


@dataclass
class BoundsReport:
    K: int
    L: int
    condorcet_winner: Optional[int]
    borda_winner: int
    gap_borda: List[float]
    gap_condorcet: Optional[List[float]]
    kl_to_p_star: Optional[List[float]]
    p_star: Optional[List[List[float]]]
    thompson_condorcet_constant: Optional[float]
    duel_lower_bound_constant: Optional[float]
    duel_lower_bound_terms: Optional[List[Optional[float]]]
    pac_sample_bound: Optional[float]
    borda_ucb_alpha: float
    borda_ucb_coefficient: Optional[float]
    t0_condition: Optional[float]
    c1: float
    c1_prime: float
    config: Dict
    log_base: str = "e"
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        """Plain-JSON view; infinities become ``None`` (see ``flags``)."""

        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            if isinstance(v, list):
                return [clean(x) for x in v]
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            return v

        return clean(asdict(self))


def regret_constants(instance: QdbInstance, cfg: BoundsConfig = BoundsConfig()) -> BoundsReport:
    s = preference_summary(instance)
    K, L = instance.K, instance.L
    probs = instance.probs
    flags: List[str] = []

    kls = pstars = None
    thm1 = prop1 = t0_cond = None
    prop1_terms = None
    a = s.condorcet
    if a is None:
        flags.append("no Condorcet winner: Condorcet constants omitted")
    else:
        gap_c = s.gap_condorcet
        kls, pstars = [], []
        for i in range(K):
            P, kl = p_star(probs[i], probs[a], tol=cfg.tolerance)
            kls.append(kl)
            pstars.append(P.probs.tolist())
        thm1 = 0.0
        for i in range(K):
            if gap_c[i] > 0 and kls[i] > 0:
                thm1 += (1 + cfg.epsilon) * gap_c[i] / kls[i]
        prop1, prop1_terms = 0.0, []
        for i in range(K):
            if i == a:
                prop1_terms.append(None)
                continue
            losers = [j for j in range(K) if s.mu[i, j] < 0.5]
            if not losers:
                prop1_terms.append(math.inf)
                prop1 = math.inf
                flags.append(f"arm {i}: no arm beats it, duel lower-bound term is infinite")
                continue
            term = min(
                (gap_c[i] + gap_c[j]) / binary_kl(s.mu[i, j], 0.5) for j in losers
            )
            prop1_terms.append(term)
            prop1 += term
        positive = [kl for i, kl in enumerate(kls) if i != a and kl > 0]
        if positive:
            t0_cond = lemma7_f(c1(L), cfg.epsilon_prime, 0.5, L)[0] + max(
                lemma7_f(c1_prime(L), kl / (1 + cfg.epsilon), 0.5, L)[0] for kl in positive
            )

    others = [i for i in range(K) if i != s.borda_winner]
    gaps_b = s.gap_borda[others]
    pac = bucb_coef = None
    if np.all(gaps_b > 0):
        pac = math.log(1 / (2 * cfg.delta)) / 90 * float(np.sum(1 / gaps_b**2))
    else:
        flags.append("a non-winning arm ties the Borda winner: Borda constants undefined")
    alpha, undefined = recommended_alpha(K, cfg.epsilon_prime)
    if undefined:
        flags.append("K = 2: Borda-UCB alpha formula undefined, using 2")
    if pac is not None:
        bucb_coef = float(gaps_b.sum()) * 4 * alpha / float(gaps_b.min()) ** 2

    return BoundsReport(
        K=K,
        L=L,
        condorcet_winner=a,
        borda_winner=s.borda_winner,
        gap_borda=s.gap_borda.tolist(),
        gap_condorcet=None if a is None else s.gap_condorcet.tolist(),
        kl_to_p_star=kls,
        p_star=pstars,
        thompson_condorcet_constant=thm1,
        duel_lower_bound_constant=prop1,
        duel_lower_bound_terms=prop1_terms,
        pac_sample_bound=pac,
        borda_ucb_alpha=alpha,
        borda_ucb_coefficient=bucb_coef,
        t0_condition=t0_cond,
        c1=c1(L),
        c1_prime=c1_prime(L),
        config=asdict(cfg),
        flags=flags,
    )


# Monte-Carlo checks of the concentration inequalities.

CHECKS = ("lemma1", "lemma2", "lemma3", "lemma4", "corollary1")


@dataclass(frozen=True)
class ConcentrationResult:
    kind: str
    n: int
    eps: float
    trials: int
    empirical_tail: float
    bound: float

    @property
    def informative(self) -> bool:
        return self.bound <= 1

    @property
    def passed(self) -> bool:
        return self.empirical_tail <= self.bound


def concentration_bound(kind: str, L: int, n: int, eps: float) -> float:
    if kind == "lemma1":
        return c1(L) * n**L * math.exp(-n * eps)
    if kind == "lemma2":
        return 2**L * math.exp(-n * eps**2 / 2)
    if kind == "lemma3":
        return 2 * math.exp(-2 * n * eps**2)
    if kind == "lemma4":
        return c1_prime(L) * n**L * math.exp(-n * eps)
    if kind == "corollary1":
        return c1_prime(L) * n**L * math.exp(-2 * n * eps**2)
    raise InvalidArgumentError(f"unknown check {kind!r}; choose from {CHECKS}")


def concentration_statistic(kind: str, P: np.ndarray, n: int, trials: int, rng: RngState) -> np.ndarray:
    """Draws of the deviation statistic each inequality controls."""
    if kind in ("lemma1", "lemma2", "lemma3"):
        P_hat = rng.generator.multinomial(n, P, size=trials) / n
        if kind == "lemma1":
            return kl_rows(P_hat, P)
        if kind == "lemma2":
            return np.abs(P_hat - P).sum(axis=1)
        return np.abs(np.cumsum(P_hat, axis=1) - np.cumsum(P)).max(axis=1)
    if kind in ("lemma4", "corollary1"):
        theta = sample_dirichlet_rows(np.broadcast_to(n * P + 1, (trials, P.size)), rng)
        if kind == "lemma4":
            return kl_rows(P, theta)
        return np.abs(theta - P).sum(axis=1)
    raise InvalidArgumentError(f"unknown check {kind!r}; choose from {CHECKS}")


def concentration_check(
    kind: str,
    P: ArrayLike,
    n: int,
    eps: float,
    trials: int,
    rng: RngState,
) -> ConcentrationResult:
    """Empirical ``P[statistic >= eps]`` next to the inequality's bound."""
    P = FeedbackDistribution(as_probs(P)).probs
    if trials < 1 or n < 1 or eps <= 0:
        raise InvalidArgumentError("need trials >= 1, n >= 1 and eps > 0")
    bound = concentration_bound(kind, P.size, n, eps)
    stat = concentration_statistic(kind, P, n, trials, rng)
    tail = float(np.mean(stat >= eps))
    return ConcentrationResult(kind, n, eps, trials, tail, bound)
