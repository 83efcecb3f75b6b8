"""Qualitative dueling bandits: policies, regret simulation and bound constants."""
from .core import (
    FeedbackDistribution,
    InvalidArgumentError,
    PreferenceSummary,
    QdbInstance,
    cumulative_weights,
    duel_sample,
    mu_matrix,
    preference_summary,
    win_prob,
)
from .sampling import RngState, sample_categorical, sample_dirichlet
from .policies import (
    BordaUCB,
    BucbConfig,
    DuelReduction,
    ObservationCounts,
    RUCB,
    TcsConfig,
    ThompsonBorda,
    ThompsonCondorcet,
    bucb_select,
    make_policy,
    tbs_select,
    tcs_select,
    update_counts,
)
from .simulator import RegretAggregate, RegretTrace, RunConfig, UnsupportedMetricError, run_many, run_once
from .analysis import (
    BoundsConfig,
    BoundsReport,
    binary_kl,
    concentration_check,
    kl_divergence,
    lemma7_f,
    p_star,
    recommended_alpha,
    regret_constants,
)

__version__ = "0.1.0"
