import numpy as np
import pytest

from qdb.core import InvalidArgumentError
from qdb.sampling import RngState, replication_seed, sample_categorical, sample_dirichlet, sample_dirichlet_rows

from conftest import three_sigma


def test_same_seed_same_stream():
    a, b = RngState(42), RngState(42)
    assert [a.next_uniform() for _ in range(1000)] == [b.next_uniform() for _ in range(1000)]


def test_uniform_range_and_mean():
    rng = RngState(1)
    u = rng.generator.random(10**6)  # same generator path as next_uniform
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) <= 0.002
    v = [rng.next_uniform() for _ in range(10_000)]
    assert all(0 <= x < 1 for x in v)


def test_replication_seed_fan_out():
    assert replication_seed(100, 3) == 103
    assert RngState(5).spawn(2).seed == 7


def test_categorical_point_mass(rng):
    assert {sample_categorical([0, 0, 1, 0], rng) for _ in range(500)} == {3}


def test_categorical_coin():
    rng = RngState(3)
    n = 100_000
    freq = np.mean([sample_categorical([0.5, 0.5], rng) == 1 for _ in range(n)])
    assert abs(freq - 0.5) <= three_sigma(0.5, n)


def test_categorical_histogram():
    p = np.array([0.2, 0.4, 0.3, 0.1])
    rng = RngState(4)
    n = 100_000
    draws = np.array([sample_categorical(p, rng) for _ in range(n)])
    hist = np.bincount(draws, minlength=5)[1:] / n
    assert np.all(np.abs(hist - p) <= three_sigma(p, n))


def test_categorical_skips_zero_levels(rng):
    draws = {sample_categorical([0.0, 0.5, 0.0, 0.5], rng) for _ in range(2000)}
    assert draws == {2, 4}


def test_dirichlet_is_distribution(rng):
    d = sample_dirichlet([1.0, 2.0, 3.0], rng)
    assert d.L == 3 and abs(d.probs.sum() - 1) < 1e-12


def test_dirichlet_rejects_non_positive(rng):
    with pytest.raises(InvalidArgumentError):
        sample_dirichlet([1.0, 0.0], rng)


@pytest.mark.parametrize("L", [2, 4])
def test_dirichlet_uniform_prior_means(L):
    rng = RngState(10)
    n = 100_000
    theta = sample_dirichlet_rows(np.ones((n, L)), rng)
    var = (1 / L) * (1 - 1 / L) / (L + 1)  # Dirichlet marginal variance
    assert np.all(np.abs(theta.mean(axis=0) - 1 / L) <= 3 * np.sqrt(var / n))


def test_dirichlet_posterior_means():
    P = np.array([0.2, 0.4, 0.3, 0.1])
    alpha = 50 * P + 1
    a0 = alpha.sum()
    rng = RngState(11)
    n = 100_000
    theta = sample_dirichlet_rows(np.broadcast_to(alpha, (n, 4)), rng)
    mean = alpha / a0
    var = mean * (1 - mean) / (a0 + 1)
    assert np.all(np.abs(theta.mean(axis=0) - mean) <= 3 * np.sqrt(var / n))


def test_dirichlet_concentrates():
    rng = RngState(12)
    theta = sample_dirichlet_rows(np.broadcast_to([1000.0, 1.0], (10_000, 2)), rng)
    assert np.mean(theta[:, 0] >= 0.95) >= 0.99


def test_dirichlet_small_shapes(rng):
    theta = sample_dirichlet_rows(np.full((1000, 3), 0.05), rng)
    assert np.all(theta >= 0)
    np.testing.assert_allclose(theta.sum(axis=1), 1.0)
