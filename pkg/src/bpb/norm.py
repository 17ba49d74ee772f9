"""Norm-attainment correctors.

Given ``T`` with ``||T|| = 1`` that almost attains its norm at ``x0``, build a
nearby ``S`` of the same class that attains its norm at a nearby ``x1`` (or at
``x0`` itself when ``target_point_exact`` is set). The construction truncates
the top of the spectrum of ``|T|``: singular values above ``1 - eps`` are
pushed to 1, everything else is left alone.
"""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from . import certificate as cb
from .certificate import CorrectionCertificate
from .errors import (
    AlmostAttainmentViolated,
    ClassMismatch,
    EmptyProjection,
    InvalidEpsilon,
    InvalidP,
    NotPositive,
    PreconditionViolated,
)
from .isometry import pointify, transitive_isometry
from .linalg import (
    OperatorClass,
    adjoint,
    as_matrix,
    as_unit_vector,
    class_check,
    class_residual,
    operator_norm,
    polar_decompose,
    quadratic_value,
    schatten_norm,
)
from .spectral import (
    SpectralRegion,
    apply_borel_function,
    hermitian_spectral_measure,
    normal_polar,
    normal_spectral_measure,
    push_forward,
    spectral_projection,
)

NORM_TOL = 1e-8
RESIDUAL_TOL = 1e-8
EXACT_RESIDUAL_TOL = 1e-7
BOUNDARY_NOTE = "eigenvalues equal to 1 - eps are kept on the f(t) = 1 side"


class _Correction(NamedTuple):
    S: np.ndarray
    x1: np.ndarray
    certificate: CorrectionCertificate


class Correction(_Correction):
    """``(S, x1, certificate)``; iterative correctors also attach ``trace``."""

    trace = None

    def with_trace(self, trace):
        self.trace = trace
        return self


def check_epsilon(eps, upper=1.0):
    eps = float(eps)
    if not 0.0 < eps < upper:
        raise InvalidEpsilon(f"epsilon must lie in (0, {upper:g}), got {eps!r}")
    return eps


def truncation_function(epsilon):
    """f(t) = 1 on [0, 1 - eps] and 1/t on (1 - eps, 1]."""
    eps = check_epsilon(epsilon)
    cut = 1.0 - eps

    def f(t):
        t = float(np.real(t))
        return 1.0 if t <= cut else 1.0 / t

    return f


@dataclass(frozen=True)
class NormCorrectionRequest:
    T: np.ndarray
    x0: np.ndarray
    epsilon: float
    cls: OperatorClass = OperatorClass.GENERAL
    p: float | None = None
    target_point_exact: bool = False

    def __post_init__(self):
        T = as_matrix(self.T)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "x0", as_unit_vector(self.x0, T.shape[0], "x0"))
        object.__setattr__(self, "epsilon", check_epsilon(self.epsilon))
        object.__setattr__(self, "cls", OperatorClass.parse(self.cls))
        if self.p is not None and not (self.p >= 1):
            raise InvalidP(f"Schatten exponent must be >= 1, got {self.p!r}")

    @property
    def threshold(self):
        return 1.0 - self.epsilon ** 2 / 4.0

    def validate(self, cls=None):
        """Check ``||T|| = 1``, almost attainment at x0 and class membership."""
        cls = self.cls if cls is None else OperatorClass.parse(cls)
        nrm = operator_norm(self.T)
        if abs(nrm - 1.0) > NORM_TOL:
            raise PreconditionViolated(f"||T|| = {nrm!r}, expected 1 (normalize first)", norm=nrm)
        value = float(np.linalg.norm(self.T @ self.x0))
        if not value > self.threshold:
            raise AlmostAttainmentViolated(
                f"||T x0|| = {value:.12g} does not exceed 1 - eps^2/4 = {self.threshold:.12g}",
                value=value, threshold=self.threshold)
        if not class_check(self.T, cls):
            err = NotPositive if cls is OperatorClass.POSITIVE else ClassMismatch
            raise err(f"T is not in class {cls.value}", residual=class_residual(self.T, cls))
        return value


def _tag(cls, exact, suffix=""):
    return f"norm:{cls.value}{suffix}" + ("+exact" if exact else "")


def _top_projection(E_abs, eps, x0):
    A = SpectralRegion.above(1.0 - eps)
    EA = spectral_projection(E_abs, A)
    v = EA @ x0
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise EmptyProjection("E(A) x0 = 0 although x0 almost attains the norm")
    return EA, v / nv


def _base_certificate(T, x0, S, x1, eps, cls, EA, extras=None, info=None):
    nS = operator_norm(S)
    residual = max(abs(nS - 1.0), abs(float(np.linalg.norm(S @ x1)) - 1.0))
    ex = {
        "x1_in_range": (float(np.linalg.norm(EA @ x1 - x1)), 1e-9),
        "class_residual": (class_residual(S, cls), class_tol(S)),
    }
    ex.update(extras or {})
    return CorrectionCertificate(
        theorem_tag=_tag(cls, False),
        op_distance=operator_norm(S - T),
        theoretical_bound=cb.norm_op_bound(eps),
        point_distance=float(np.linalg.norm(x0 - x1)),
        point_bound=cb.norm_point_bound(eps),
        attainment_residual=residual,
        residual_tol=RESIDUAL_TOL,
        extras=ex,
        info=dict(info or {}),
        notes=(BOUNDARY_NOTE,),
    )


def class_tol(S):
    return 1e-8 * max(1.0, operator_norm(S))


def _exact(req, S, x1, base):
    """Transfer the attainment point from x1 back to x0."""
    T, x0, eps = req.T, req.x0, req.epsilon
    S_exact = pointify(S, x1, x0, "norm", tol=EXACT_RESIDUAL_TOL)
    residual = max(abs(operator_norm(S_exact) - 1.0),
                   abs(float(np.linalg.norm(S_exact @ x0)) - 1.0))
    op = operator_norm(S_exact - T)
    extras = dict(base.extras)
    extras.pop("x1_in_range", None)
    extras["class_residual"] = (class_residual(S_exact, req.cls), class_tol(S_exact))
    # the conjugation moves S by at most 2 ||x0 - x1|| ||S||, ||S|| = 1
    extras["transfer"] = (op, base.op_distance + 2.0 * base.point_distance)
    info = dict(base.info)
    info.update(base_op_distance=base.op_distance, base_point_distance=base.point_distance)
    cert = CorrectionCertificate(
        theorem_tag=base.theorem_tag + "+exact",
        op_distance=op,
        theoretical_bound=cb.norm_exact_op_bound(eps),
        point_distance=0.0,
        point_bound=0.0,
        attainment_residual=residual,
        residual_tol=EXACT_RESIDUAL_TOL,
        extras=extras,
        info=info,
        notes=base.notes + ("3 eps bound for the norm-mode transfer is derived (eps + 2 eps)",),
    )
    return Correction(S_exact, x0.copy(), cert)


def norm_correct_positive(req):
    """R = T f(T) for positive T, attaining ``<R x1, x1> = ||R|| = 1`` at
    ``x1 = E(A) x0 / ||E(A) x0||`` with ``A = {t > 1 - eps}``."""
    req.validate(OperatorClass.POSITIVE)
    T, x0, eps = req.T, req.x0, req.epsilon
    E = hermitian_spectral_measure(T)
    f = truncation_function(eps)
    R = apply_borel_function(E, lambda z: z.real * f(z.real))
    R = 0.5 * (R + adjoint(R))
    EA, x1 = _top_projection(E, eps, x0)
    extras = {
        "quadratic_attainment": (abs(quadratic_value(R, x1) - 1.0), RESIDUAL_TOL),
        "equals_Tf(T)": (operator_norm(R - T @ apply_borel_function(E, lambda z: f(z))), 1e-9),
    }
    cert = _base_certificate(T, x0, R, x1, eps, OperatorClass.POSITIVE, EA, extras)
    out = Correction(R, x1, cert)
    return _exact(req, R, x1, cert) if req.target_point_exact else out


def _truncate_modulus(U, E_abs, eps):
    f = truncation_function(eps)
    G = apply_borel_function(E_abs, lambda t: t.real * f(t.real))
    return U @ (0.5 * (G + adjoint(G)))


def _selfadjoint_like(T, x0, eps):
    """S = U g(|T|) with U, |T| from the normal functional calculus."""
    E = normal_spectral_measure(T)
    pol = normal_polar(T, E)
    E_abs = push_forward(E, abs)
    S = _truncate_modulus(pol.isometry_part, E_abs, eps)
    EA, x1 = _top_projection(E_abs, eps, x0)
    return S, x1, EA, pol.isometry_part


def _general(T, x0, eps):
    pol = polar_decompose(T)
    E_abs = hermitian_spectral_measure(pol.modulus)
    S = _truncate_modulus(pol.isometry_part, E_abs, eps)
    EA, x1 = _top_projection(E_abs, eps, x0)
    return S, x1, EA, pol.isometry_part


def norm_correct(req):
    """Class-preserving norm corrector; returns ``(S, x1, certificate)``."""
    cls = req.cls
    if cls is OperatorClass.POSITIVE:
        return norm_correct_positive(req)
    req.validate()
    T, x0, eps = req.T, req.x0, req.epsilon
    if cls is OperatorClass.UNITARY:
        # every unit vector attains the norm of a unitary
        S, x1 = T.copy(), x0.copy()
        cert = CorrectionCertificate(
            theorem_tag=_tag(cls, req.target_point_exact),
            op_distance=0.0,
            theoretical_bound=cb.norm_exact_op_bound(eps) if req.target_point_exact else eps,
            point_distance=0.0,
            point_bound=0.0 if req.target_point_exact else cb.norm_point_bound(eps),
            attainment_residual=max(abs(operator_norm(S) - 1.0), abs(float(np.linalg.norm(S @ x0)) - 1.0)),
            residual_tol=RESIDUAL_TOL,
            extras={"class_residual": (class_residual(S, cls), class_tol(S))},
        )
        return Correction(S, x1, cert)
    if cls is OperatorClass.ANTI_SYMMETRIC:
        S, x1, EA, U = _selfadjoint_like(1j * T, x0, eps)
        S, U = -1j * S, -1j * U
        S = 0.5 * (S - adjoint(S))
    elif cls in (OperatorClass.SELF_ADJOINT, OperatorClass.NORMAL):
        S, x1, EA, U = _selfadjoint_like(T, x0, eps)
        if cls is OperatorClass.SELF_ADJOINT:
            S = 0.5 * (S + adjoint(S))
    else:
        S, x1, EA, U = _general(T, x0, eps)
    # y0 = T x0 / ||T x0|| is the canonical almost-attaining direction
    y0 = T @ x0
    y0 = y0 / np.linalg.norm(y0)
    uy = adjoint(U) @ y0
    extras = {
        "U*U x1 = x1": (float(np.linalg.norm(adjoint(U) @ (U @ x1) - x1)), 1e-9),
        "y0 pulled back": (float(np.linalg.norm(uy / np.linalg.norm(uy) - x1)), cb.norm_point_bound(eps)),
    }
    cert = _base_certificate(T, x0, S, x1, eps, cls, EA, extras)
    if req.target_point_exact:
        return _exact(req, S, x1, cert)
    return Correction(S, x1, cert)


def norm_correct_schatten(req, M=None):
    """Schatten-p corrector ``S~ = S R`` attaining its norm at x0 itself,
    with ``R`` the transitive isometry taking x0 to x1.

    ``M`` bounds ``sigma_p(T)``; it defaults to ``sigma_p(T)``.
    """
    if req.p is None or req.p == math.inf:
        raise InvalidP("the Schatten corrector needs a finite exponent p >= 1")
    p = float(req.p)
    T, x0, eps = req.T, req.x0, req.epsilon
    sp_T = schatten_norm(T, p)
    M = sp_T if M is None else float(M)
    if sp_T > M * (1.0 + 1e-12):
        raise PreconditionViolated(f"sigma_p(T) = {sp_T!r} exceeds M = {M!r}", sigma_p=sp_T, M=M)
    base_req = NormCorrectionRequest(T, x0, eps, OperatorClass.GENERAL)
    S, x1, base = norm_correct(base_req)
    R = transitive_isometry(x0, x1) if not np.array_equal(x0, x1) else np.eye(T.shape[0], dtype=np.complex128)
    S_tilde = S @ R
    residual = max(abs(operator_norm(S_tilde) - 1.0), abs(float(np.linalg.norm(S_tilde @ x0)) - 1.0))
    bound = cb.norm_schatten_bound(eps, M)
    op = operator_norm(S_tilde - T)
    sp = schatten_norm(S_tilde - T, p)
    info = dict(base.info)
    info.update(M=M, base_op_distance=base.op_distance, base_point_distance=base.point_distance,
                base_schatten_distance=schatten_norm(S - T, p))
    cert = CorrectionCertificate(
        theorem_tag="norm:schatten",
        op_distance=op,
        theoretical_bound=bound,
        point_distance=0.0,
        point_bound=0.0,
        attainment_residual=residual,
        residual_tol=RESIDUAL_TOL,
        schatten_p=p,
        schatten_distance=sp,
        schatten_bound=bound,
        extras={"op <= schatten": (op, sp)},
        info=info,
        notes=base.notes,
    )
    return Correction(S_tilde, x0.copy(), cert)
