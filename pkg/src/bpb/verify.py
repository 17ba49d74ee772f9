"""Re-check a correction result from its serialized form alone.

Every headline quantity is recomputed from the stored matrices and compared
both with the recorded value and with the bound re-derived from the theorem
tag.
"""

from dataclasses import dataclass

import numpy as np

from .certificate import SLACK, CorrectionCertificate, expected_bounds
from .correct import correct
from .io import matrix_from_json, matrix_to_json, vector_from_json, vector_to_json
from .harness import attainment_threshold, attainment_value
from .linalg import (
    OperatorClass,
    class_residual,
    numerical_radius,
    operator_norm,
    quadratic_value,
    schatten_norm,
)

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    bound: float
    ok: bool

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        return f"{status}  {self.name}: {self.value:.6e} <= {self.bound:.6e}"


def _le(name, value, bound, slack=SLACK):
    return Check(name, float(value), float(bound), bool(value <= bound + slack))


def result_document(T, x0, epsilon, mode, cls, p, exact, S, x1, cert, M=None, scale=1.0):
    return {
        "mode": mode,
        "class": OperatorClass.parse(cls).value,
        "epsilon": float(epsilon),
        "p": p,
        "M": M,
        "exact_point": bool(exact),
        "scale": float(scale),
        "input": {"T": matrix_to_json(T), "x0": vector_to_json(x0)},
        "S": matrix_to_json(S),
        "x1": vector_to_json(x1),
        "certificate": cert.to_dict(),
    }


def run_and_document(T, x0, epsilon, mode, cls, p=None, exact=False, scale=1.0):
    """Correct and serialize; returns ``(document, correction)``."""
    result = correct(T, x0, epsilon, mode, cls, p=p, exact=exact)
    S, x1, cert = result
    M = cert.info.get("M")
    return result_document(T, x0, epsilon, mode, cls, p, exact, S, x1, cert, M, scale), result


def verify_document(doc):
    """Return the list of :class:`Check` results for a result document."""
    T = matrix_from_json(doc["input"]["T"])
    x0 = vector_from_json(doc["input"]["x0"])
    S = matrix_from_json(doc["S"])
    x1 = vector_from_json(doc["x1"])
    eps = float(doc["epsilon"])
    mode = doc["mode"]
    cls = OperatorClass.parse(doc["class"])
    cert = CorrectionCertificate.from_dict(doc["certificate"])
    p = cert.schatten_p
    M = doc.get("M")
    if p is not None and M is None:
        M = schatten_norm(T, p)
    exp = expected_bounds(cert.theorem_tag, eps, M)
    checks = []

    thr = cert.info.get("threshold", attainment_threshold(mode, cls, eps))
    gap_value = attainment_value(T, x0, mode)
    checks.append(Check("precondition at x0", 1.0 - gap_value, 1.0 - thr, bool(gap_value > thr)))

    op = operator_norm(S - T)
    checks.append(_le("||S - T||", op, exp["op"]))
    point = float(np.linalg.norm(x1 - x0))
    checks.append(_le("||x1 - x0||", point, exp["point"]))
    # a zero point bound means the correction attains at x0 itself
    x_att = x0 if exp["point"] == 0.0 else x1
    if mode == "norm":
        residual = max(abs(operator_norm(S) - 1.0), abs(float(np.linalg.norm(S @ x_att)) - 1.0))
    else:
        nu, _ = numerical_radius(S)
        residual = max(abs(nu - 1.0), abs(abs(quadratic_value(S, x_att)) - 1.0))
    checks.append(Check("attainment residual", residual, exp["residual_tol"],
                        bool(residual <= exp["residual_tol"])))
    if mode == "nu" and cls is OperatorClass.UNITARY:
        ctol = 1e-9
    else:
        ctol = 1e-8 * max(1.0, operator_norm(S))
    cres = class_residual(S, cls)
    checks.append(Check(f"class {cls.value}", cres, ctol, bool(cres <= ctol)))
    if exp["schatten"] is not None:
        sp = schatten_norm(S - T, p)
        checks.append(_le(f"sigma_{p:g}(S - T)", sp, exp["schatten"]))
        checks.append(_le("recorded sigma_p distance", abs(sp - cert.schatten_distance),
                          CONSISTENCY_TOL * max(1.0, sp), 0.0))

    for name, new, rec in (("op_distance", op, cert.op_distance),
                           ("point_distance", point, cert.point_distance)):
        checks.append(_le(f"recorded {name}", abs(new - rec), CONSISTENCY_TOL * max(1.0, new), 0.0))
    checks.append(_le("recorded bound", abs(cert.theoretical_bound - exp["op"]),
                      1e-12 * max(1.0, exp["op"]), 0.0))
    for name, (value, bound) in cert.extras.items():
        checks.append(_le(f"extra: {name}", value, bound))
    return checks
