"""Numerical-radius correctors.

Given ``T`` with ``nu(T) = 1`` and ``|<T x0, x0>|`` close to 1, build a nearby
``S`` of the same class whose numerical radius is attained at a nearby point
(or at ``x0`` itself with ``target_point_exact``).

General, positive and Schatten operators go through a rank-one perturbation
scheme: bumps ``alpha_n (eps/4)^n x_n x_n*`` are added at successive
near-maximisers until the current point is a global maximiser of
``|<T_n x, x>|``. Self-adjoint operators are symmetrised afterwards, unitary
operators are rotated, and normal operators are rebuilt from their spectral
measure.
"""

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np

from . import certificate as cb
from .certificate import CorrectionCertificate
from .errors import (
    AlmostAttainmentViolated,
    ClassMismatch,
    IterationStalled,
    InvalidP,
    NotPositive,
    PreconditionViolated,
)
from .isometry import pointify, transitive_isometry
from .linalg import (
    OperatorClass,
    _align_phase,
    adjoint,
    as_matrix,
    as_unit_vector,
    class_check,
    class_residual,
    local_radius_ascent,
    normalize,
    numerical_radius,
    operator_norm,
    quadratic_value,
    schatten_norm,
)
from .norm import Correction, check_epsilon, class_tol
from .spectral import (
    SpectralRegion,
    normal_spectral_measure,
    region_truncation,
    spectral_projection,
    unit_phase,
)

NU_TOL = 1e-6
STOP_TOL = 1e-9
N_MAX = 40
UNITARY_RESIDUAL_TOL = 1e-10
NORMAL_RESIDUAL_TOL = 1e-7
COMMUTE_TOL = 1e-9


def default_eta(eps):
    """Almost-attainment modulus used when the request does not set one."""
    return eps * eps / 16.0


@dataclass(frozen=True)
class NuCorrectionRequest:
    T: np.ndarray
    x0: np.ndarray
    epsilon: float
    cls: OperatorClass = OperatorClass.GENERAL
    p: float | None = None
    target_point_exact: bool = False
    eta: Callable[[float], float] | None = None
    stop_tol: float = STOP_TOL
    n_max: int = N_MAX

    def __post_init__(self):
        T = as_matrix(self.T)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "x0", as_unit_vector(self.x0, T.shape[0], "x0"))
        object.__setattr__(self, "cls", OperatorClass.parse(self.cls))
        upper = 0.5 if self.cls is OperatorClass.NORMAL else 1.0
        object.__setattr__(self, "epsilon", check_epsilon(self.epsilon, upper))
        if self.p is not None and not (self.p >= 1):
            raise InvalidP(f"Schatten exponent must be >= 1, got {self.p!r}")
        if self.n_max < 1:
            raise ValueError("n_max must be positive")

    def threshold(self, cls=None):
        """Lower bound that ``|<T x0, x0>|`` has to exceed."""
        cls = self.cls if cls is None else cls
        eps = self.epsilon
        if cls is OperatorClass.UNITARY:
            return 1.0 - eps * eps / 2.0
        if cls is OperatorClass.NORMAL:
            return 1.0 - eps
        eta = (self.eta or default_eta)(eps)
        return 1.0 - min(eps, eta)

    def validate(self, cls=None):
        cls = self.cls if cls is None else OperatorClass.parse(cls)
        T, x0 = self.T, self.x0
        nu, _ = numerical_radius(T)
        if abs(nu - 1.0) > NU_TOL:
            raise PreconditionViolated(f"nu(T) = {nu!r}, expected 1 (normalize first)", nu=nu)
        if cls is OperatorClass.NORMAL:
            nrm = operator_norm(T)
            if abs(nrm - 1.0) > NU_TOL:
                raise PreconditionViolated(f"||T|| = {nrm!r}, expected 1", norm=nrm)
        q = float(abs(quadratic_value(T, x0)))
        thr = self.threshold(cls)
        if not q > thr:
            raise AlmostAttainmentViolated(f"|<T x0, x0>| = {q:.12g} does not exceed {thr:.12g}",
                                           value=q, threshold=thr)
        if not class_check(T, cls):
            err = NotPositive if cls is OperatorClass.POSITIVE else ClassMismatch
            raise err(f"T is not in class {cls.value}", residual=class_residual(T, cls))
        return nu, q


@dataclass(frozen=True)
class IterationStep:
    x: np.ndarray
    alpha: complex
    nu: float  # |<T_n x_n, x_n>|
    size: float  # (eps/4)^n


@dataclass
class IterationTrace:
    steps: list = field(default_factory=list)
    converged: bool = False

    def to_dict(self):
        return {
            "converged": self.converged,
            "steps": [
                {
                    "x": [[float(z.real), float(z.imag)] for z in s.x],
                    "alpha": [float(s.alpha.real), float(s.alpha.imag)],
                    "nu": s.nu,
                    "size": s.size,
                }
                for s in self.steps
            ],
        }


def _phase(q, cls):
    if cls is OperatorClass.POSITIVE:
        return 1.0 + 0j
    if cls is OperatorClass.SELF_ADJOINT:
        return complex(math.copysign(1.0, q.real))
    return complex(q / abs(q))


def nu_iterate(req):
    """Rank-one perturbation scheme; returns ``(T_inf, x_inf, trace)``.

    Step 1 bumps at x0 itself. Step n > 1 bumps at the local maximiser of
    ``|<T_{n-1} x, x>|`` reached by ascent from ``x_{n-1}`` (falling back to
    the global witness when the ascent stops at a non-global maximiser), with
    ``alpha_n`` the phase of ``<T_{n-1} x_n, x_n>``. Stops once the current
    point attains ``nu(T_n)`` to ``stop_tol``.
    """
    T, x0, eps, cls = req.T, req.x0, req.epsilon, req.cls
    hermitian = cls in (OperatorClass.SELF_ADJOINT, OperatorClass.POSITIVE)
    trace = IterationTrace()
    nu_T, witness = numerical_radius(T)
    if nu_T - abs(quadratic_value(T, x0)) <= req.stop_tol:
        trace.converged = True
        return T.copy(), x0.copy(), trace
    Tn, x, nu_prev = T.copy(), x0, nu_T
    for n in range(1, req.n_max + 1):
        if n > 1:
            y, val = local_radius_ascent(Tn, x)
            if val < nu_prev - req.stop_tol:
                y = witness
            x = _align_phase(y, x0)
        q = quadratic_value(Tn, x)
        if abs(q) == 0.0:
            raise AlmostAttainmentViolated("<T x, x> = 0: no phase to align with", step=n)
        alpha = _phase(q, cls)
        size = (eps / 4.0) ** n
        Tn = Tn + (alpha * size) * np.outer(x, x.conj())
        if hermitian:
            Tn = 0.5 * (Tn + adjoint(Tn))
        value = float(abs(quadratic_value(Tn, x)))
        trace.steps.append(IterationStep(x.copy(), alpha, value, size))
        dist = float(np.linalg.norm(x - x0))
        if not dist < eps:
            raise IterationStalled(f"step {n}: ||x_n - x0|| = {dist:.4g} reached eps = {eps:g}",
                                   trace=trace, step=n, distance=dist)
        nu_prev, witness = numerical_radius(Tn)
        if nu_prev - value <= req.stop_tol:
            trace.converged = True
            return Tn, x, trace
    raise IterationStalled(f"no attainment after {req.n_max} steps", trace=trace, step=req.n_max)


def _nu_residual(S, x):
    nu, _ = numerical_radius(S)
    return max(abs(nu - 1.0), abs(abs(quadratic_value(S, x)) - 1.0))


def _tag(cls, exact):
    return f"nu:{cls.value}" + ("+exact" if exact else "")


def _exact(req, S, x1, base, base_norm_bound=2.0):
    """Conjugate so that the radius is attained at x0; the bound composes the
    base bound with the 2 ||x0 - x1|| ||S|| transfer (||S|| <= 2 nu(S))."""
    T, x0 = req.T, req.x0
    S_exact = pointify(S, x1, x0, "nu", tol=NU_TOL)
    op = operator_norm(S_exact - T)
    extras = dict(base.extras)
    if "class_residual" in extras:
        extras["class_residual"] = (class_residual(S_exact, req.cls), class_tol(S_exact))
    extras["transfer"] = (op, base.op_distance + 2.0 * base.point_distance * operator_norm(S))
    info = dict(base.info)
    info.update(base_op_distance=base.op_distance, base_point_distance=base.point_distance)
    if base.schatten_p is not None:
        info.update(base_schatten_distance=base.schatten_distance, base_schatten_bound=base.schatten_bound)
    cert = CorrectionCertificate(
        theorem_tag=base.theorem_tag + "+exact",
        op_distance=op,
        theoretical_bound=cb.transfer_bound(base.theoretical_bound, base.point_bound, base_norm_bound),
        point_distance=0.0,
        point_bound=0.0,
        attainment_residual=_nu_residual(S_exact, x0),
        residual_tol=NU_TOL,
        extras=extras,
        info=info,
        notes=base.notes,
    )
    return Correction(S_exact, x0.copy(), cert)


def nu_correct(req, M=None):
    """Corrector for the general, positive and Schatten classes:
    ``S~ = T_inf / nu(T_inf)`` attaining at ``x1 = x_inf``."""
    cls = req.cls
    if cls not in (OperatorClass.GENERAL, OperatorClass.POSITIVE, OperatorClass.SCHATTEN):
        raise ClassMismatch(f"nu_correct handles general, positive and schatten, not {cls.value}")
    req.validate()
    T, x0, eps = req.T, req.x0, req.epsilon
    T_inf, x1, trace = nu_iterate(req)
    nu_inf, _ = numerical_radius(T_inf)
    S = T_inf / nu_inf
    if cls is OperatorClass.POSITIVE:
        S = 0.5 * (S + adjoint(S))
    extras = {"iteration_total": (operator_norm(T_inf - T), cb.nu_iteration_bound(eps))}
    if cls is OperatorClass.POSITIVE:
        extras["class_residual"] = (class_residual(S, cls), class_tol(S))
    schatten = {}
    info = {"iterations": len(trace.steps), "nu_T_inf": nu_inf,
            "eta": (req.eta or default_eta)(eps), "threshold": req.threshold()}
    if req.p is not None:
        p = float(req.p)
        M = schatten_norm(T, p) if M is None else float(M)
        extras["iteration_total_schatten"] = (schatten_norm(T_inf - T, p), cb.nu_iteration_bound(eps))
        schatten = dict(schatten_p=p, schatten_distance=schatten_norm(S - T, p),
                        schatten_bound=cb.nu_schatten_bound(eps, M))
        info["M"] = M
    cert = CorrectionCertificate(
        theorem_tag=_tag(cls, False),
        op_distance=operator_norm(S - T),
        theoretical_bound=eps,
        point_distance=float(np.linalg.norm(x1 - x0)),
        point_bound=eps,
        attainment_residual=_nu_residual(S, x1),
        residual_tol=NU_TOL,
        extras=extras,
        info=info,
        **schatten,
    )
    out = _exact(req, S, x1, cert) if req.target_point_exact else Correction(S, x1, cert)
    return out.with_trace(trace)


def nu_correct_selfadjoint(req):
    """Self-adjoint (and, through ``i T``, anti-symmetric) corrector."""
    cls = req.cls
    if cls not in (OperatorClass.SELF_ADJOINT, OperatorClass.ANTI_SYMMETRIC):
        raise ClassMismatch(f"nu_correct_selfadjoint handles selfadjoint and antisymmetric, not {cls.value}")
    req.validate()
    T0, x0, eps = req.T, req.x0, req.epsilon
    rot = 1j if cls is OperatorClass.ANTI_SYMMETRIC else 1.0
    H = rot * T0
    H = 0.5 * (H + adjoint(H))
    sign = 1.0 if quadratic_value(H, x0).real >= 0 else -1.0
    H = sign * H
    sub = NuCorrectionRequest(H, x0, eps, OperatorClass.SELF_ADJOINT, eta=req.eta,
                              stop_tol=req.stop_tol, n_max=req.n_max)
    T_inf, x1, trace = nu_iterate(sub)
    nu_inf, _ = numerical_radius(T_inf)
    S_tilde = T_inf / nu_inf
    r = quadratic_value(H, x0).real
    phase = unit_phase(quadratic_value(S_tilde, x1))
    S_prime = np.conj(phase) * S_tilde
    S_h = 0.5 * (S_prime + adjoint(S_prime))
    extras = {
        "iteration_total": (operator_norm(T_inf - H), cb.nu_iteration_bound(eps)),
        "|e^(i theta) - 1|": (abs(phase - 1.0), 4.0 * eps),
        "|e^(i theta) - r|": (abs(phase - r), 3.0 * eps),
        "||S~ - e^(-i theta) S~||": (operator_norm(S_tilde - S_prime), 8.0 * eps),
    }
    # undo the sign flip and the rotation
    S = (sign / rot) * S_h
    extras["class_residual"] = (class_residual(S, cls), class_tol(S))
    S_norm = operator_norm(S)
    nu_S, _ = numerical_radius(S)
    cert = CorrectionCertificate(
        theorem_tag=_tag(cls, False),
        op_distance=operator_norm(S - T0),
        theoretical_bound=cb.nu_selfadjoint_bound(eps),
        point_distance=float(np.linalg.norm(x1 - x0)),
        point_bound=eps,
        attainment_residual=max(abs(nu_S - 1.0), abs(abs(quadratic_value(S, x1)) - 1.0)),
        residual_tol=NU_TOL,
        extras=extras,
        info={"iterations": len(trace.steps), "nu_T_inf": nu_inf, "sign": sign,
              "nu_minus_norm": abs(nu_S - S_norm),
              "eta": (req.eta or default_eta)(eps), "threshold": req.threshold()},
    )
    out = _exact(req, S, x1, cert) if req.target_point_exact else Correction(S, x1, cert)
    return out.with_trace(trace)


def nu_correct_unitary(req):
    """``S = R T`` with R the transitive isometry taking ``T x0`` to
    ``e^{i theta} x0``; attains at x0 itself."""
    if req.cls is not OperatorClass.UNITARY:
        raise ClassMismatch(f"nu_correct_unitary handles unitary, not {req.cls.value}")
    req.validate()
    T, x0, eps = req.T, req.x0, req.epsilon
    q = quadratic_value(T, x0)
    phase = unit_phase(q)
    R = transitive_isometry(normalize(T @ x0), phase * x0)
    S = R @ T
    n = T.shape[0]
    extras = {
        "||R - Id||": (operator_norm(R - np.eye(n)), eps),
        "class_residual": (class_residual(S, OperatorClass.UNITARY), 1e-9),
    }
    nu_S, _ = numerical_radius(S)
    cert = CorrectionCertificate(
        theorem_tag=_tag(req.cls, req.target_point_exact),
        op_distance=operator_norm(S - T),
        theoretical_bound=eps,
        point_distance=0.0,
        point_bound=0.0,
        attainment_residual=max(abs(abs(quadratic_value(S, x0)) - 1.0), abs(nu_S - 1.0)),
        residual_tol=UNITARY_RESIDUAL_TOL,
        extras=extras,
        info={"theta": float(np.angle(phase))},
    )
    return Correction(S, x0.copy(), cert)


def nu_correct_normal(req, M=None):
    """Normal corrector built from the spectral measure of T.

    With ``Delta = {|z| > 1 - sqrt(2 eps)}`` the spectrum is split into the
    outer part, whose eigenvalues are pushed to the unit circle, and the
    inner part, which is kept. On the outer spectral subspace the unitary
    part is rotated so that ``x_eps = E(Delta) x0 / ||E(Delta) x0||`` lands on
    the unit circle of the numerical range.
    """
    if req.cls is not OperatorClass.NORMAL:
        raise ClassMismatch(f"nu_correct_normal handles normal, not {req.cls.value}")
    req.validate()
    T, x0, eps = req.T, req.x0, req.epsilon
    n = T.shape[0]
    s = math.sqrt(2.0 * eps)
    q = quadratic_value(T, x0)
    if abs(q) == 0.0:
        raise AlmostAttainmentViolated("<T x0, x0> = 0")
    phase = np.conj(unit_phase(q))  # e^{i theta}: e^{i theta} q = |q|
    E = normal_spectral_measure(T)
    outer = SpectralRegion.outside_closed_disk(1.0 - s)
    inner = outer.complement()
    P = spectral_projection(E, outer)
    v = P @ x0
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise AlmostAttainmentViolated("E(Delta) x0 = 0")
    x_eps = v / nv
    N1 = region_truncation(E, outer, unit_phase)
    N2 = region_truncation(E, inner, lambda z: z)
    target = normalize(N1 @ (phase * x_eps))
    R = transitive_isometry(x_eps, target)
    Rs = adjoint(R)
    S = Rs @ N1 + N2
    I = np.eye(n)
    shift = float(np.linalg.norm(T @ (phase * x_eps) - x_eps))
    extras = {
        "||E(Delta) x0|| >= 1 - sqrt(2 eps)": ((1.0 - s) - nv, 0.0),
        "||T(e^(i theta) x0) - x0||": (float(np.linalg.norm(T @ (phase * x0) - x0)), s),
        "||T(e^(i theta) x_eps) - x_eps||": (shift, cb.normal_shift_bound(eps)),
        "||R - Id||": (operator_norm(R - I), cb.normal_rotation_bound(eps)),
        "(R* N1) N2": (operator_norm(Rs @ N1 @ N2), COMMUTE_TOL),
        "N2 (R* N1)": (operator_norm(N2 @ Rs @ N1), COMMUTE_TOL),
        "R* E(Delta) R = E(Delta)": (operator_norm(Rs @ P @ R - P), COMMUTE_TOL),
        "class_residual": (class_residual(S, OperatorClass.NORMAL), 1e-8),
        "||S|| <= 1": (operator_norm(S) - 1.0, 0.0),
    }
    nu_S, _ = numerical_radius(S)
    schatten = {}
    info = {"theta": float(np.angle(phase)), "E(Delta) x0 norm": nv}
    if req.p is not None:
        p = float(req.p)
        M = schatten_norm(T, p) if M is None else float(M)
        schatten = dict(schatten_p=p, schatten_distance=schatten_norm(S - T, p),
                        schatten_bound=cb.normal_schatten_bound(eps, M))
        info["M"] = M
    cert = CorrectionCertificate(
        theorem_tag=_tag(req.cls, False) + ("+schatten" if req.p is not None else ""),
        op_distance=operator_norm(S - T),
        theoretical_bound=cb.normal_op_bound(eps),
        point_distance=float(np.linalg.norm(x_eps - x0)),
        point_bound=cb.normal_point_bound(eps),
        attainment_residual=max(abs(nu_S - 1.0), abs(abs(quadratic_value(S, x_eps)) - 1.0)),
        residual_tol=NORMAL_RESIDUAL_TOL,
        extras=extras,
        info=info,
        notes=("eigenvalues with |z| = 1 - sqrt(2 eps) stay in the kept part",),
        **schatten,
    )
    if req.target_point_exact:
        return _exact(req, S, x_eps, cert, base_norm_bound=2.0)
    return Correction(S, x_eps, cert)


def correct_nu(req, M=None):
    """Dispatch a request to the corrector of its class."""
    cls = req.cls
    if cls is OperatorClass.UNITARY:
        return nu_correct_unitary(req)
    if cls is OperatorClass.NORMAL:
        return nu_correct_normal(req, M)
    if cls in (OperatorClass.SELF_ADJOINT, OperatorClass.ANTI_SYMMETRIC):
        return nu_correct_selfadjoint(req)
    return nu_correct(req, M)
