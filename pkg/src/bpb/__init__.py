"""Bishop-Phelps-Bollobas point-property correctors for matrices.

Given an operator that almost attains its norm (or numerical radius) at a
unit vector, build a nearby operator of the same class that attains it
exactly, together with a certificate of the achieved distances.
"""

from .certificate import CorrectionCertificate
from .correct import correct
from .errors import BPBError
from .isometry import conjugate_transport, pointify, transitive_isometry
from .kernels import BACKEND
from .linalg import (
    OperatorClass,
    class_check,
    hermitian_eig,
    numerical_radius,
    operator_norm,
    polar_decompose,
    schatten_norm,
    svd,
)
from .norm import NormCorrectionRequest, norm_correct, norm_correct_positive, norm_correct_schatten
from .nu import (
    NuCorrectionRequest,
    nu_correct,
    nu_correct_normal,
    nu_correct_selfadjoint,
    nu_correct_unitary,
    nu_iterate,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BPBError",
    "CorrectionCertificate",
    "NormCorrectionRequest",
    "NuCorrectionRequest",
    "OperatorClass",
    "class_check",
    "conjugate_transport",
    "correct",
    "hermitian_eig",
    "norm_correct",
    "norm_correct_positive",
    "norm_correct_schatten",
    "nu_correct",
    "nu_correct_normal",
    "nu_correct_selfadjoint",
    "nu_correct_unitary",
    "nu_iterate",
    "numerical_radius",
    "operator_norm",
    "pointify",
    "polar_decompose",
    "schatten_norm",
    "svd",
    "transitive_isometry",
]
