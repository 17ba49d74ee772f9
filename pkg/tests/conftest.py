import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def unit(rng, n):
    x = cgauss(rng, n)
    return x / np.linalg.norm(x)


def hermitian(rng, n):
    A = cgauss(rng, n, n)
    return 0.5 * (A + A.conj().T)


def unitary(rng, n):
    Q, R = np.linalg.qr(cgauss(rng, n, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def normal(rng, n):
    U = unitary(rng, n)
    return (U * cgauss(rng, n)) @ U.conj().T


def opnorm(A):
    """numpy/LAPACK oracle, independent of the package's Jacobi solver."""
    return float(np.linalg.norm(A, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
