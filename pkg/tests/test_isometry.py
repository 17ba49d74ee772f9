import numpy as np
import pytest
from hypothesis import given, strategies as st

from bpb.errors import DimensionMismatch, PreconditionViolated
from bpb.isometry import conjugate_transport, pointify, transitive_isometry
from bpb.linalg import numerical_radius, quadratic_value

from conftest import cgauss, opnorm, seeds, unit


def test_examples():
    x = np.array([1, 0], dtype=complex)
    assert np.allclose(transitive_isometry(x, x), np.eye(2))
    R = transitive_isometry(x, -x)
    assert np.allclose(R @ x, -x)
    assert opnorm(R - np.eye(2)) == pytest.approx(2.0)
    y = np.array([0, 1], dtype=complex)
    R = transitive_isometry(x, y)
    assert np.allclose(R @ x, y)
    assert opnorm(R - np.eye(2)) == pytest.approx(np.sqrt(2))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        transitive_isometry(np.array([1, 0]), np.array([1, 0, 0]))


@given(seeds, st.integers(1, 12), st.floats(0.0, 2.0))
def test_transitive_isometry(seed, n, scale):
    rng = np.random.default_rng(seed)
    x = unit(rng, n)
    y = x + scale * unit(rng, n)
    y = y / np.linalg.norm(y) if np.linalg.norm(y) > 1e-6 else unit(rng, n)
    R = transitive_isometry(x, y)
    assert np.linalg.norm(R @ x - y) <= 1e-12
    assert np.allclose(R.conj().T @ R, np.eye(n), atol=1e-12)
    assert abs(opnorm(R - np.eye(n)) - np.linalg.norm(x - y)) <= 1e-10
    # identity off span{x, y}
    if n > 2:
        B, _ = np.linalg.qr(np.stack([x, y], axis=1))
        z = unit(rng, n)
        z = z - B @ (B.conj().T @ z)
        assert np.linalg.norm(R @ z - z) <= 1e-10


@given(seeds, st.integers(2, 8))
def test_conjugate_transport(seed, n):
    rng = np.random.default_rng(seed)
    T = cgauss(rng, n, n)
    x, y = unit(rng, n), unit(rng, n)
    S = conjugate_transport(T, x, y)
    assert abs(opnorm(S) - opnorm(T)) <= 1e-10 * opnorm(T)
    assert np.linalg.norm(S @ x) == pytest.approx(np.linalg.norm(T @ y), rel=1e-10)
    assert quadratic_value(S, x) == pytest.approx(quadratic_value(T, y), rel=1e-9)
    assert opnorm(S - T) <= 2 * np.linalg.norm(x - y) * opnorm(T) + 1e-10


def test_pointify_norm_and_nu():
    S = np.diag([1.0, 0.3]).astype(complex)
    x1 = np.array([1, 0], dtype=complex)
    x0 = np.array([0.8, 0.6], dtype=complex)
    P = pointify(S, x1, x0, "norm")
    assert np.linalg.norm(P @ x0) == pytest.approx(1.0)
    P = pointify(S, x1, x0, "nu")
    assert abs(quadratic_value(P, x0)) == pytest.approx(1.0)
    assert numerical_radius(P)[0] == pytest.approx(1.0)
    with pytest.raises(PreconditionViolated):
        pointify(S, x0, x1, "norm")
    with pytest.raises(ValueError):
        pointify(S, x1, x0, "other")
