import numpy as np
import pytest

from qdb.sampling import RngState


def brute_win_prob(x, y):
    """P[X > Y] + P[X = Y] / 2 by enumerating every outcome pair."""
    total = 0.0
    for a, pa in enumerate(x):
        for b, pb in enumerate(y):
            if a > b:
                total += pa * pb
            elif a == b:
                total += 0.5 * pa * pb
    return total


def random_simplex(gen, L, sparse=False):
    p = gen.dirichlet(np.ones(L))
    if sparse and L > 1:
        p[gen.random(L) < 0.3] = 0.0
        if p.sum() == 0:
            p[gen.integers(L)] = 1.0
        p = p / p.sum()
    return p


def three_sigma(p, n):
    return 3 * np.sqrt(p * (1 - p) / n)


@pytest.fixture
def rng():
    return RngState(12345)


@pytest.fixture
def gen():
    return np.random.default_rng(2024)


# Acceptance results are collected here and echoed once at the end of the run,
# one line per criterion.
_ACCEPTANCE = {}


@pytest.fixture
def accept():
    def record(criterion, ok, detail=""):
        key = str(criterion)
        prev = _ACCEPTANCE.get(key)
        status = "PASS" if ok else "FAIL"
        if prev is not None:
            status = "PASS" if prev[0] == "PASS" and ok else "FAIL"
            detail = f"{prev[1]}; {detail}" if detail else prev[1]
        _ACCEPTANCE[key] = (status, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: (len(k), k)):
        status, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {status}  {detail}")
