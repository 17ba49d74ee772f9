"""Transitive isometries of the unit sphere and the conjugation transfer that
moves an attainment point from one unit vector to another."""

import numpy as np

from .errors import DimensionMismatch, NoConvergence, PreconditionViolated
from .linalg import (
    adjoint,
    as_matrix,
    as_unit_vector,
    inner,
    numerical_radius,
    operator_norm,
    quadratic_value,
)

ISOMETRY_TOL = 1e-8
# below this |beta| the target is a unimodular multiple of x
_PARALLEL_TOL = 1e-15


def transitive_isometry(x, y):
    """Unitary R with ``R x = y`` and ``||R - Id|| = ||x - y||``, acting as the
    identity on the orthogonal complement of span{x, y}.

    Writing ``y = a x + b w`` with ``w`` a unit vector orthogonal to ``x``,
    R restricted to span{x, w} is the SU(2) block ``[[a, -conj(b)], [b,
    conj(a)]]``. Its eigenvalues are ``exp(+-i phi)`` with ``cos phi = Re a``,
    so ``||R - Id||^2 = 2 - 2 Re a = ||x - y||^2``. When ``y`` is parallel to
    ``x`` the block degenerates to the phase map ``Id + (a - 1) x x*``.
    """
    x = as_unit_vector(x, name="x")
    y = as_unit_vector(y, name="y")
    if x.shape != y.shape:
        raise DimensionMismatch(f"x has length {x.shape[0]}, y has length {y.shape[0]}")
    n = x.shape[0]
    a = inner(y, x)
    r = y - a * x
    r = r - inner(r, x) * x
    b = float(np.linalg.norm(r))
    R = np.eye(n, dtype=np.complex128)
    if b <= _PARALLEL_TOL:
        a = a / abs(a)
        R += (a - 1.0) * np.outer(x, x.conj())
    else:
        w = r / b
        a = complex(inner(y, x))
        scale = np.hypot(abs(a), b)
        a, b = a / scale, b / scale
        basis = np.stack([x, w], axis=1)
        block = np.array([[a - 1.0, -np.conj(b)], [b, np.conj(a) - 1.0]])
        R += basis @ block @ adjoint(basis)
    gap = abs(operator_norm(R - np.eye(n)) - float(np.linalg.norm(x - y)))
    if gap > ISOMETRY_TOL:
        raise NoConvergence(f"transitive isometry misses ||R - Id|| = ||x - y|| by {gap:.2e}")
    return R


def conjugate_transport(T, x, y):
    """R* T R for the transitive isometry R mapping x to y.

    The result has the norm and numerical radius of T, its value at x
    reproduces T at y, and it is within 2 ||x - y|| ||T|| of T.
    """
    T = as_matrix(T)
    x = as_unit_vector(x, name="x")
    y = as_unit_vector(y, name="y")
    if x.shape[0] != T.shape[0] or y.shape[0] != T.shape[0]:
        raise DimensionMismatch("T, x and y must have matching dimensions")
    if np.array_equal(x, y):
        return T.copy()
    R = transitive_isometry(x, y)
    return adjoint(R) @ T @ R


def pointify(S_tilde, x1, x0, mode, tol=1e-8):
    """Move the attainment point of ``S_tilde`` from ``x1`` to ``x0``.

    ``mode="norm"`` requires ``||S_tilde|| = ||S_tilde x1|| = 1``;
    ``mode="nu"`` requires ``nu(S_tilde) = |<S_tilde x1, x1>| = 1``.
    Returns ``conjugate_transport(S_tilde, x0, x1)``, which attains at ``x0``.
    """
    S_tilde = as_matrix(S_tilde, "S_tilde")
    n = S_tilde.shape[0]
    x1 = as_unit_vector(x1, n, "x1")
    x0 = as_unit_vector(x0, n, "x0")
    if mode == "norm":
        residual = max(abs(operator_norm(S_tilde) - 1.0), abs(np.linalg.norm(S_tilde @ x1) - 1.0))
    elif mode == "nu":
        nu, _ = numerical_radius(S_tilde)
        residual = max(abs(nu - 1.0), abs(abs(quadratic_value(S_tilde, x1)) - 1.0))
    else:
        raise ValueError(f"mode must be 'norm' or 'nu', got {mode!r}")
    if residual > tol:
        raise PreconditionViolated(f"S_tilde does not attain 1 at x1 (residual {residual:.2e})",
                                   residual=float(residual))
    return conjugate_transport(S_tilde, x0, x1)
