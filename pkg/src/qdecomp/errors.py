"""Exception types raised by the library.

Every error that maps to a CLI exit code derives from one of two roots:
``DomainError`` (bad inputs or failed numerics, exit code 1) and
``TheoremViolation`` (a computed result contradicts a proven bound,
exit code 2).
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for input-validation and numerical-domain failures."""

    code = "DomainError"


class NotHermitian(DomainError):
    code = "NotHermitian"

    def __init__(self, magnitude: float):
        self.magnitude = float(magnitude)
        super().__init__(f"matrix is not Hermitian: max asymmetry {magnitude:.3e}")


class NotUnitTrace(DomainError):
    code = "NotUnitTrace"

    def __init__(self, magnitude: float):
        self.magnitude = float(magnitude)
        super().__init__(f"matrix trace differs from 1 by {magnitude:.3e}")


class NotPSD(DomainError):
    code = "NotPSD"

    def __init__(self, magnitude: float):
        self.magnitude = float(magnitude)
        super().__init__(f"matrix has negative eigenvalue {magnitude:.3e}")


class ConvergenceFailure(DomainError):
    code = "ConvergenceFailure"


class OutsideSupport(DomainError):
    code = "OutsideSupport"

    def __init__(self, magnitude: float):
        self.magnitude = float(magnitude)
        super().__init__(
            f"vector has component of norm {magnitude:.3e} outside the support"
        )


class NotUnitary(DomainError):
    code = "NotUnitary"

    def __init__(self, magnitude: float):
        self.magnitude = float(magnitude)
        super().__init__(f"matrix is not unitary: max deviation {magnitude:.3e}")


class IndexOutOfRange(DomainError):
    code = "IndexOutOfRange"


class NoConvergence(DomainError):
    code = "NoConvergence"

    def __init__(self, message: str, residual: float):
        self.residual = float(residual)
        super().__init__(f"{message} (final residual {residual:.3e})")


class RadicandOutOfRange(DomainError):
    code = "RadicandOutOfRange"

    def __init__(self, value: float):
        self.value = float(value)
        super().__init__(f"radicand {value:.3e} is below -1e-12")


class PathDegenerate(DomainError):
    code = "PathDegenerate"


class PreconditionViolated(DomainError):
    code = "PreconditionViolated"


class SchemaError(DomainError):
    """A JSON document does not match the expected wire format."""

    code = "SchemaError"


class TheoremViolation(Exception):
    """A computed quantity violates a bound that holds mathematically."""

    code = "TheoremViolation"
