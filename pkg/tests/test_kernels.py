import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bpb import kernels

from conftest import cgauss, hermitian, seeds

compiled = kernels.compiled_backend()
needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")
backends = [kernels.python_backend] + ([compiled] if compiled is not None else [])


@pytest.mark.parametrize("impl", backends, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(seed=seeds, n=st.integers(1, 12))
def test_jacobi_matches_lapack(impl, seed, n):
    A = hermitian(np.random.default_rng(seed), n)
    w, V, nrot = impl.jacobi_eigh(A, True)
    assert nrot <= 30 * n * n
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(A), atol=1e-11 * max(1, np.linalg.norm(A)))
    assert np.allclose(A @ V, V * w, atol=1e-10 * max(1, np.linalg.norm(A)))


@pytest.mark.parametrize("impl", backends, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(seed=seeds, n=st.integers(1, 15))
def test_lambda_max_sweep_matches_lapack(impl, seed, n):
    rng = np.random.default_rng(seed)
    T = cgauss(rng, n, n) * 10.0 ** rng.uniform(-3, 3)
    th = rng.uniform(0, 2 * np.pi, 7)
    want = []
    for t in th:
        M = np.exp(1j * t) * T
        want.append(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[-1])
    got = impl.lambda_max_sweep(T, th)
    assert np.allclose(got, want, rtol=0, atol=1e-13 * np.linalg.norm(T))


@pytest.mark.parametrize("impl", backends, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_jacobi_tiny_offdiagonal(impl):
    A = np.diag([1.0, 2.0, 3.0]).astype(complex)
    A[0, 1], A[1, 0] = 1e-310, 1e-310
    w, _, _ = impl.jacobi_eigh(A, True)
    assert np.allclose(np.sort(w), [1, 2, 3])


@needs_ext
@given(seed=seeds, n=st.integers(1, 8))
def test_backend_parity(seed, n):
    rng = np.random.default_rng(seed)
    T = cgauss(rng, n, n)
    th = np.linspace(0, 2 * np.pi, 17)
    a = compiled.lambda_max_sweep(T, th)
    b = kernels.python_backend.lambda_max_sweep(T, th)
    assert np.allclose(a, b, atol=1e-12 * max(1, np.linalg.norm(T)))
    X = cgauss(rng, 500, n)
    for mode in (0, 1):
        va, ia = compiled.points_max(T, X, mode)
        vb, ib = kernels.python_backend.points_max(T, X, mode)
        assert va == pytest.approx(vb, rel=1e-12)


def test_pure_python_switch():
    env = dict(os.environ, BPB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import bpb; print(bpb.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
def test_default_backend_is_compiled():
    if os.environ.get("BPB_PURE_PYTHON", "") not in ("", "0"):
        pytest.skip("fallback forced by environment")
    assert kernels.BACKEND == "compiled"
