"""Dense complex matrix kernels.

Hermitian eigen-decomposition (cyclic complex Jacobi), SVD and polar
decomposition built on it, operator and Schatten norms, the numerical radius,
and membership tests for the operator classes the correctors work with.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; the helpers
:func:`as_matrix` and :func:`as_unit_vector` validate inputs at API
boundaries.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatch,
    InvalidMatrix,
    InvalidP,
    NoConvergence,
    NotHermitian,
    NotUnitVector,
)

UNIT_TOL = 1e-12
JACOBI_REL_TOL = 1e-13
N_ANGLES = 720
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class OperatorClass(Enum):
    GENERAL = "general"
    POSITIVE = "positive"
    SELF_ADJOINT = "selfadjoint"
    ANTI_SYMMETRIC = "antisymmetric"
    UNITARY = "unitary"
    NORMAL = "normal"
    SCHATTEN = "schatten"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "hermitian": "selfadjoint",
            "skewhermitian": "antisymmetric",
            "antihermitian": "antisymmetric",
            "schattenp": "schatten",
        }
        key = aliases.get(key, key)
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown operator class {name!r}")


def as_matrix(T, name="T"):
    """Validate and convert to a square, finite complex128 array."""
    A = np.asarray(T, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidMatrix(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return A


def as_unit_vector(x, dim=None, name="x", tol=UNIT_TOL):
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] < 1:
        raise NotUnitVector(f"{name} must be a non-empty vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"{name} has length {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise NotUnitVector(f"{name} has non-finite entries")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > tol:
        raise NotUnitVector(f"{name} has norm {nrm!r}", norm=float(nrm))
    return v


def normalize(x):
    x = np.asarray(x, dtype=np.complex128)
    return x / np.linalg.norm(x)


def inner(x, y):
    """<x, y>, linear in the first argument."""
    return np.vdot(y, x)


def adjoint(T):
    return np.conj(T).T


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # columns orthonormal


@dataclass(frozen=True)
class PolarFactors:
    isometry_part: np.ndarray
    modulus: np.ndarray

    def recompose(self):
        return self.isometry_part @ self.modulus


def _jacobi(A, vectors):
    try:
        return kernels.jacobi_eigh(A, vectors, JACOBI_REL_TOL)
    except kernels.KernelNoConvergence as exc:
        raise NoConvergence(str(exc)) from None


def hermitian_eig(A):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending."""
    A = as_matrix(A, "A")
    fro = np.linalg.norm(A)
    skew = np.linalg.norm(A - adjoint(A))
    if skew > 1e-8 * max(1.0, fro):
        raise NotHermitian(f"||A - A*||_F = {skew:.3e}", residual=float(skew))
    A = 0.5 * (A + adjoint(A))
    w, V, _ = _jacobi(A, True)
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], V[:, order])


def hermitian_eigvals(A):
    """Eigenvalues only (descending); ``A`` must already be Hermitian."""
    w, _, _ = _jacobi(0.5 * (A + adjoint(A)), False)
    return np.sort(w)[::-1]


def _orthonormal_completion(U, cols, n):
    """Fill the columns of ``U`` not listed in ``cols`` with standard basis
    vectors orthogonalised (twice) against everything already present."""
    basis = [U[:, j] for j in cols]
    fill = [j for j in range(n) if j not in set(cols)]
    k = 0
    for i in range(n):
        if k == len(fill):
            break
        e = np.zeros(n, dtype=np.complex128)
        e[i] = 1.0
        for _ in range(2):
            for b in basis:
                e = e - np.vdot(b, e) * b
        nrm = np.linalg.norm(e)
        if nrm > 1e-8:
            e = e / nrm
            U[:, fill[k]] = e
            basis.append(e)
            k += 1
    return U


def svd(T):
    """Singular value decomposition ``T = U diag(s) V*`` via the Hermitian
    eigenproblem of ``T*T``.

    Singular values are taken as ``||T v_j||`` (accurate to rounding in
    absolute terms) and the left vectors on ker(T) are completed by
    Gram-Schmidt against the standard basis, so ``U`` is unitary.
    """
    T = as_matrix(T)
    n = T.shape[0]
    c = float(np.max(np.abs(T))) if n else 0.0
    c = c if c > 0.0 else 1.0
    # work on T/c so T*T neither overflows nor underflows
    ed = hermitian_eig(adjoint(T / c) @ (T / c))
    V = ed.eigenvectors
    B = (T / c) @ V
    s = np.linalg.norm(B, axis=0)
    order = np.argsort(-s, kind="stable")
    V, B, s = V[:, order], B[:, order], s[order]
    smax = s[0] if n else 0.0
    rank_tol = 1e-13 * smax
    U = np.zeros((n, n), dtype=np.complex128)
    ranged = []
    for j in range(n):
        if smax == 0.0 or s[j] <= rank_tol:
            s[j] = 0.0
            continue
        u = B[:, j] / s[j]
        s[j] *= c
        for _ in range(2):
            for i in ranged:
                u = u - np.vdot(U[:, i], u) * U[:, i]
        U[:, j] = u / np.linalg.norm(u)
        ranged.append(j)
    U = _orthonormal_completion(U, ranged, n)
    return U, s, V


def singular_values(T):
    return svd(T)[1]


def polar_decompose(T):
    """Polar factors ``T = U|T|`` with ``U`` extended to a unitary."""
    U, s, V = svd(T)
    modulus = (V * s) @ adjoint(V)
    return PolarFactors(U @ adjoint(V), 0.5 * (modulus + adjoint(modulus)))


def operator_norm(T):
    T = as_matrix(T)
    c = float(np.max(np.abs(T)))
    if c == 0.0:
        return 0.0
    w = hermitian_eigvals(adjoint(T / c) @ (T / c))
    return float(c * math.sqrt(max(w[0], 0.0)))


def schatten_norm(T, p):
    if p != math.inf and not p >= 1:
        raise InvalidP(f"Schatten exponent must be >= 1 or inf, got {p!r}")
    s = singular_values(T)
    if p == math.inf:
        return float(s[0])
    if s[0] == 0.0:
        return 0.0
    # scale first: s**p overflows/underflows for large p otherwise
    return float(s[0] * np.sum((s / s[0]) ** p) ** (1.0 / p))


def commutator_norm(T):
    """Frobenius norm of TT* - T*T."""
    return float(np.linalg.norm(T @ adjoint(T) - adjoint(T) @ T))


def is_normal(T, rel_tol=1e-12):
    scale = max(np.linalg.norm(T) ** 2, 1e-300)
    return commutator_norm(T) <= rel_tol * scale


def normal_eig(T, cluster_tol=None):
    """Joint diagonalisation of a normal matrix.

    Diagonalises the Hermitian part, then the skew part inside every cluster
    of (numerically) equal Hermitian-part eigenvalues. Returns the complex
    eigenvalues ``lam`` and a unitary ``Q`` with ``T ~= Q diag(lam) Q*``.
    Normality is the caller's responsibility.
    """
    T = as_matrix(T)
    n = T.shape[0]
    if cluster_tol is None:
        cluster_tol = 1e-8 * max(np.linalg.norm(T), 1e-300)
    H = 0.5 * (T + adjoint(T))
    K = (T - adjoint(T)) / 2j
    ed = hermitian_eig(H)
    Q = ed.eigenvectors.copy()
    w = ed.eigenvalues
    start = 0
    for j in range(1, n + 1):
        if j == n or w[j - 1] - w[j] > cluster_tol:
            if j - start > 1:
                Qb = Q[:, start:j]
                Kc = adjoint(Qb) @ K @ Qb
                inner_ed = hermitian_eig(0.5 * (Kc + adjoint(Kc)))
                Q[:, start:j] = Qb @ inner_ed.eigenvectors
            start = j
    lam = np.einsum("ij,ik,kj->j", Q.conj(), T, Q)
    return lam, Q


def hermitian_part(T, theta):
    M = np.exp(1j * theta) * T
    return 0.5 * (M + adjoint(M))


def _lambda_max(T, theta):
    return float(kernels.lambda_max_sweep(T, np.array([theta]))[0])


def _golden_max(f, a, b, width):
    """Golden-section maximisation on [a, b]; returns (argmax, max)."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if b - a <= width:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _top_vector(T, theta, seed=None):
    """Unit top eigenvector of the Hermitian part of exp(i theta) T; inside a
    degenerate top eigenspace the vector closest to ``seed`` is chosen."""
    ed = hermitian_eig(hermitian_part(T, theta))
    w, V = ed.eigenvalues, ed.eigenvectors
    x = V[:, 0]
    if seed is not None:
        scale = max(abs(w[0]), abs(w[-1]), 1e-300)
        top = V[:, w >= w[0] - 1e-12 * scale]
        if top.shape[1] > 1:
            proj = top @ (adjoint(top) @ seed)
            if np.linalg.norm(proj) > 1e-8:
                x = proj
    return normalize(x)


def _align_phase(x, ref):
    """Multiply x by a unimodular scalar so that <x, ref> is real, >= 0."""
    z = inner(x, ref)
    if abs(z) == 0.0:
        return x
    return x * (abs(z) / z)


def quadratic_value(T, x):
    return inner(T @ x, x)


def numerical_radius(T, tol=1e-10, n_angles=N_ANGLES):
    """Numerical radius ``nu(T) = max |<Tx, x>|`` with a witness unit vector.

    For normal ``T`` this is the spectral radius. Otherwise ``nu(T)`` is the
    maximum over theta of lambda_max of the Hermitian part of
    ``exp(i theta) T``: an equispaced sweep of ``n_angles`` angles brackets
    every candidate maximum (the curve is ``||T||``-Lipschitz) and each
    bracket is refined by golden-section search.

    Returns ``(value, witness)`` with ``|<T w, w>| >= value - tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    T = as_matrix(T)
    n = T.shape[0]
    fro = float(np.linalg.norm(T))
    e1 = np.zeros(n, dtype=np.complex128)
    e1[0] = 1.0
    if fro == 0.0:
        return 0.0, e1
    if n == 1:
        return float(abs(T[0, 0])), e1
    if is_normal(T):
        lam, Q = normal_eig(T)
        j = int(np.argmax(np.abs(lam)))
        x = normalize(Q[:, j])
        return float(max(abs(lam[j]), abs(quadratic_value(T, x)))), x
    step = 2.0 * math.pi / n_angles
    thetas = step * np.arange(n_angles)
    h = kernels.lambda_max_sweep(T, thetas)
    hbest = float(h.max())
    is_peak = (h >= np.roll(h, 1)) & (h >= np.roll(h, -1))
    cand = np.flatnonzero(is_peak & (h >= hbest - fro * step))
    cand = cand[np.argsort(-h[cand])][:8]
    width = max(tol / fro, 1e-13)
    # ties within rounding go to the smallest angle (flat curves, e.g. nilpotents)
    noise = 16.0 * np.finfo(float).eps * fro
    best_theta, best_val = thetas[int(np.argmax(h >= hbest - noise))], hbest
    for k in cand:
        th, val = _golden_max(lambda t: _lambda_max(T, t), thetas[k] - step, thetas[k] + step, width)
        if val > best_val + noise:
            best_theta, best_val = th, val
    x = _top_vector(T, best_theta)
    value = max(best_val, float(abs(quadratic_value(T, x))))
    return value, x


def local_radius_ascent(T, seed, max_fixed_point=60):
    """Local maximiser of ``|<Tx, x>|`` on the unit sphere reached by ascent
    from ``seed``.

    Fixed-point steps ``x <- top eigenvector of Re(exp(i theta) T)`` with
    ``theta = -arg <Tx, x>`` never decrease ``|<Tx, x>|``; the final angle
    is polished by golden-section search in a bracket that is widened until
    it encloses a local maximum. Returns the maximiser, phase-aligned with
    the seed.
    """
    T = as_matrix(T)
    x = normalize(seed)
    fro = max(float(np.linalg.norm(T)), 1e-300)
    best_x, best_val = x, abs(quadratic_value(T, x))
    q = quadratic_value(T, x)
    theta = -np.angle(q) if abs(q) > 0 else 0.0
    last_step = math.pi
    for _ in range(max_fixed_point):
        y = _top_vector(T, theta, seed=best_x)
        qy = quadratic_value(T, y)
        if abs(qy) >= best_val:
            best_x, best_val = y, abs(qy)
        new_theta = -np.angle(qy) if abs(qy) > 0 else theta
        last_step = abs((new_theta - theta + math.pi) % (2 * math.pi) - math.pi)
        theta = new_theta
        if last_step < 1e-13:
            break
    if last_step > 0:
        f = lambda t: _lambda_max(T, t)
        w = max(4.0 * last_step, 1e-9)
        f0 = f(theta)
        while w < math.pi / 4 and (f(theta - w) > f0 or f(theta + w) > f0):
            w *= 2.0
        th, _ = _golden_max(f, theta - w, theta + w, max(1e-13, 1e-15 / fro))
        y = _top_vector(T, th, seed=best_x)
        if abs(quadratic_value(T, y)) >= best_val:
            best_x, best_val = y, abs(quadratic_value(T, y))
    return _align_phase(best_x, seed), float(best_val)


def default_class_tol(T):
    return 1e-8 * max(1.0, operator_norm(T))


def class_residual(T, cls):
    """Distance-like measure of how far ``T`` is from ``cls`` (operator norm);
    0 for the unconstrained classes."""
    T = as_matrix(T)
    cls = OperatorClass.parse(cls)
    if cls in (OperatorClass.GENERAL, OperatorClass.SCHATTEN):
        return 0.0
    Ts = adjoint(T)
    if cls is OperatorClass.SELF_ADJOINT:
        return operator_norm(T - Ts)
    if cls is OperatorClass.ANTI_SYMMETRIC:
        return operator_norm(T + Ts)
    if cls is OperatorClass.POSITIVE:
        skew = operator_norm(T - Ts)
        low = hermitian_eigvals(0.5 * (T + Ts))[-1]
        return max(skew, -float(low), 0.0)
    if cls is OperatorClass.UNITARY:
        return operator_norm(Ts @ T - np.eye(T.shape[0]))
    if cls is OperatorClass.NORMAL:
        return operator_norm(T @ Ts - Ts @ T)
    raise ValueError(cls)


def class_check(T, cls, tol=None, p=None):
    """Membership of ``T`` in ``cls``, to within ``tol`` (operator norm).

    ``p`` is accepted for the Schatten class and only recorded: every matrix
    is a Schatten-von Neumann operator.
    """
    T = as_matrix(T)
    cls = OperatorClass.parse(cls)
    if tol is None:
        tol = default_class_tol(T)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if p is not None and p != math.inf and not p >= 1:
        raise InvalidP(f"Schatten exponent must be >= 1, got {p!r}")
    return class_residual(T, cls) <= tol
