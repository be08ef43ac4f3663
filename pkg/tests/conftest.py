import numpy as np
import pytest

from vpx.bases import monomials
from vpx.core import DiscreteDomain, Problem

ACCEPTANCE_LINES = []


def line(x):
    return np.asarray(x, dtype=float)[:, None]


def square_grid(count, lo=-1.0, hi=1.0):
    g = np.linspace(lo, hi, count)
    return np.array([(a, b) for a in g for b in g])


def random_smooth_problem(rng, d, degree, m, noise=1e-3):
    """Random points in [-1, 1]^d, target = random smooth mix plus noise."""
    fam = monomials(d, degree)
    X = rng.uniform(-1.0, 1.0, (m, d))
    w = rng.normal(size=(3, d))
    phase = rng.uniform(0.0, 2 * np.pi, 3)
    amp = rng.normal(size=3)
    f = (amp * np.sin(X @ w.T + phase)).sum(axis=1)
    f += 0.5 * np.exp(0.5 * X @ rng.normal(size=d))
    f += noise * rng.normal(size=m)
    return Problem(DiscreteDomain(X, f), fam)


@pytest.fixture
def square_problem():
    x = np.linspace(-1, 1, 201)
    return Problem(DiscreteDomain(line(x), x ** 2), monomials(1, 1))


@pytest.fixture
def product_problem():
    X = square_grid(21)
    return Problem(DiscreteDomain(X, X[:, 0] * X[:, 1]), monomials(2, 1))


@pytest.fixture
def exp_grid():
    return np.linspace(-1, 1, 1001)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for text in ACCEPTANCE_LINES:
            terminalreporter.write_line(text)


def random_basis(rng, problem, attempts=50):
    """Random n+2 domain points split into their Radon partition."""
    from vpx.errors import SingularConfiguration
    from vpx.geometry import radon_partition
    from vpx.interpolation import SignedBasis, is_nonsingular

    for _ in range(attempts):
        idx = rng.choice(problem.m, problem.n + 2, replace=False).tolist()
        try:
            rd = radon_partition(problem.g[idx])
        except SingularConfiguration:
            continue
        basis = SignedBasis([idx[i] for i in rd.positive_indices],
                            [idx[i] for i in rd.negative_indices])
        if is_nonsingular(basis, problem):
            return basis
    raise RuntimeError("no non-singular basis found")
