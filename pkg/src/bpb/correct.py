"""Single entry point over all correctors."""

import math

from .errors import InvalidP
from .linalg import OperatorClass
from .norm import NormCorrectionRequest, norm_correct, norm_correct_schatten
from .nu import NuCorrectionRequest, correct_nu

MODES = ("norm", "nu")


def correct(T, x0, epsilon, mode, cls, p=None, exact=False, M=None, eta=None):
    """Run the corrector for ``mode`` ("norm" or "nu") and class ``cls``.

    Returns ``(S, x1, certificate)``. In norm mode a Schatten class request
    uses the Schatten corrector, which attains at x0 directly.
    """
    cls = OperatorClass.parse(cls)
    if p is not None:
        p = float(p)
        if p != math.inf and not p >= 1:
            raise InvalidP(f"Schatten exponent must be >= 1, got {p!r}")
    if cls is OperatorClass.SCHATTEN and p is None:
        raise InvalidP("class schatten needs an exponent p")
    if mode == "norm":
        if cls is OperatorClass.SCHATTEN:
            return norm_correct_schatten(NormCorrectionRequest(T, x0, epsilon, cls, p, True), M)
        return norm_correct(NormCorrectionRequest(T, x0, epsilon, cls, p, exact))
    if mode == "nu":
        return correct_nu(NuCorrectionRequest(T, x0, epsilon, cls, p, exact, eta=eta), M)
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
