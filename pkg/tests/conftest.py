import numpy as np
import pytest

from accnc.oracle import QuadraticOracle


def random_symmetric(rng, d, low=-3.0, high=3.0):
    """Symmetric matrix with eigenvalues drawn uniformly from [low, high]."""
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    lam = rng.uniform(low, high, d)
    A = (Q * lam) @ Q.T
    return 0.5 * (A + A.T), lam


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


@pytest.fixture
def quad_factory():
    def make(A, b=None):
        return QuadraticOracle(np.asarray(A, float), b)
    return make


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[num])
