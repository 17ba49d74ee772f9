"""Correction certificates and the closed-form distance bounds they are
checked against."""

from dataclasses import asdict, dataclass, field
import math

SLACK = 1e-9


# --- bounds ---------------------------------------------------------------

def norm_op_bound(eps):
    return eps


def norm_point_bound(eps):
    return 4.0 * math.sqrt(eps)


def norm_exact_op_bound(eps):
    """Operator-norm distance after moving the point back to x0 (norm mode).

    Derived as eps + 2 eps for a base correction whose point moved by less
    than eps; recorded as derived rather than quoted.
    """
    return 3.0 * eps


def norm_schatten_bound(eps, M):
    beta = 4.0 * math.sqrt(eps)
    return 2.0 * eps * M + (1.0 + 2.0 * eps) * M * beta


def nu_iteration_bound(eps):
    """Total size of the rank-one perturbations: sum (eps/4)^n."""
    return eps / (4.0 - eps)


def nu_schatten_bound(eps, M):
    return (eps / (1.0 - eps)) * (M + eps) + eps


def nu_selfadjoint_bound(eps):
    return 9.0 * eps


def normal_point_bound(eps):
    return math.sqrt(2.0 * eps) + (2.0 * eps) ** 0.25


def normal_shift_bound(eps):
    """||T(e^{i theta} x_eps) - x_eps|| bound."""
    s = math.sqrt(2.0 * eps)
    return (s + 2.0 * (2.0 * eps) ** 0.25) / (1.0 - s)


def normal_rotation_bound(eps):
    """||R - Id|| bound for the rotation inside the spectral subspace."""
    return normal_shift_bound(eps) + math.sqrt(2.0 * eps)


def normal_op_bound(eps):
    return normal_shift_bound(eps) + 2.0 * math.sqrt(2.0 * eps)


def normal_schatten_bound(eps, M):
    s = math.sqrt(2.0 * eps)
    return normal_rotation_bound(eps) * M / (1.0 - s) + M * s / (1.0 - s)


def transfer_bound(base_bound, point_bound, norm_bound=2.0):
    """Bound after conjugating a corrected operator S~ (with ||S~|| <=
    norm_bound) so that it attains at x0 instead of x1: the conjugation moves
    the operator by at most 2 ||x0 - x1|| ||S~||."""
    return base_bound + 2.0 * point_bound * norm_bound


# --- certificate ----------------------------------------------------------

@dataclass(frozen=True)
class CorrectionCertificate:
    """Achieved quantities of one correction paired with their bounds.

    ``extras`` maps a name to ``(value, bound)`` for intermediate
    inequalities of the construction; ``info`` holds unchecked diagnostics.
    """

    theorem_tag: str
    op_distance: float
    theoretical_bound: float
    point_distance: float
    point_bound: float
    attainment_residual: float
    residual_tol: float
    schatten_p: float | None = None
    schatten_distance: float | None = None
    schatten_bound: float | None = None
    extras: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)
    notes: tuple = ()

    def failures(self, slack=SLACK):
        bad = []
        if not self.op_distance <= self.theoretical_bound + slack:
            bad.append("op_distance")
        if not self.point_distance <= self.point_bound + slack:
            bad.append("point_distance")
        if not self.attainment_residual <= self.residual_tol:
            bad.append("attainment_residual")
        if self.schatten_bound is not None and not self.schatten_distance <= self.schatten_bound + slack:
            bad.append("schatten_distance")
        for name, (value, bound) in self.extras.items():
            if not value <= bound + slack:
                bad.append(name)
        return bad

    @property
    def ok(self):
        return not self.failures()

    @property
    def bound_ratio(self):
        if self.theoretical_bound == 0:
            return 0.0 if self.op_distance == 0 else math.inf
        return self.op_distance / self.theoretical_bound

    def to_dict(self):
        d = asdict(self)
        d["extras"] = {k: [float(v), float(b)] for k, (v, b) in self.extras.items()}
        d["notes"] = list(self.notes)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["extras"] = {k: (float(v), float(b)) for k, (v, b) in d.get("extras", {}).items()}
        d["notes"] = tuple(d.get("notes", ()))
        d.setdefault("info", {})
        return cls(**d)


_NU_TOL = 1e-6


def expected_bounds(tag, eps, M=None):
    """Bounds implied by a theorem tag: a dict with ``op``, ``point``,
    ``schatten`` (or None) and ``residual_tol``.

    Used to re-derive a certificate's bounds instead of trusting the stored
    values.
    """
    base, *flags = tag.split("+")
    exact = "exact" in flags
    schatten_tagged = "schatten" in flags
    mode, _, cls = base.partition(":")
    if mode == "norm":
        if cls == "schatten":
            b = norm_schatten_bound(eps, M)
            return dict(op=b, point=0.0, schatten=b, residual_tol=1e-8)
        if exact:
            return dict(op=norm_exact_op_bound(eps), point=0.0, schatten=None, residual_tol=1e-7)
        return dict(op=norm_op_bound(eps), point=norm_point_bound(eps), schatten=None, residual_tol=1e-8)
    if mode != "nu":
        raise ValueError(f"unknown theorem tag {tag!r}")
    if cls == "unitary":
        return dict(op=eps, point=0.0, schatten=None, residual_tol=1e-10)
    if cls == "normal":
        op, point, tol = normal_op_bound(eps), normal_point_bound(eps), 1e-7
        sch = normal_schatten_bound(eps, M) if schatten_tagged else None
    elif cls in ("selfadjoint", "antisymmetric"):
        op, point, tol, sch = nu_selfadjoint_bound(eps), eps, _NU_TOL, None
    elif cls in ("general", "positive", "schatten"):
        op, point, tol = eps, eps, _NU_TOL
        sch = nu_schatten_bound(eps, M) if M is not None else None
    else:
        raise ValueError(f"unknown theorem tag {tag!r}")
    if exact:
        return dict(op=transfer_bound(op, point), point=0.0, schatten=None, residual_tol=_NU_TOL)
    return dict(op=op, point=point, schatten=sch, residual_tol=tol)
