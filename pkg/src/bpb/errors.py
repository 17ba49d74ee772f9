"""Exception hierarchy. Every error carries a short machine-readable ``code``
that the experiment harness records as the failure reason."""


class BPBError(Exception):
    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details


class NotHermitian(BPBError, ValueError):
    code = "not_hermitian"


class NotNormal(BPBError, ValueError):
    code = "not_normal"


class NotPositive(BPBError, ValueError):
    code = "not_positive"


class NotRealSpectrum(BPBError, ValueError):
    code = "not_real_spectrum"


class NoConvergence(BPBError, ArithmeticError):
    code = "no_convergence"


class InvalidP(BPBError, ValueError):
    code = "invalid_p"


class InvalidEpsilon(BPBError, ValueError):
    code = "invalid_epsilon"


class DimensionMismatch(BPBError, ValueError):
    code = "dimension_mismatch"


class NotUnitVector(BPBError, ValueError):
    code = "not_unit_vector"


class InvalidMatrix(BPBError, ValueError):
    code = "invalid_matrix"


class ClassMismatch(BPBError, ValueError):
    code = "class_mismatch"


class PreconditionViolated(BPBError, ValueError):
    code = "precondition_violated"


class AlmostAttainmentViolated(PreconditionViolated):
    code = "almost_attainment_violated"


class EmptyProjection(BPBError, ArithmeticError):
    code = "empty_projection"


class IterationStalled(BPBError, ArithmeticError):
    code = "iteration_stalled"


class CertificateViolation(BPBError, AssertionError):
    code = "certificate_violation"


class DimTooLarge(BPBError, ValueError):
    code = "dim_too_large"
