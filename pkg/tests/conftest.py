import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from entropy_variance import arithmetic, build_stationary_distribution, max_variance, uniform  # noqa: E402


@pytest.fixture
def arith5():
    return arithmetic(5)


@pytest.fixture
def maxvar5():
    return build_stationary_distribution(max_variance(5))


@pytest.fixture
def uniform5():
    return uniform(5)


def random_simplex(rng, m, size=None):
    """Uniform points on the simplex via normalized exponentials."""
    shape = (m,) if size is None else (size, m)
    e = rng.exponential(size=shape)
    return e / e.sum(axis=-1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[num])
