"""Exception hierarchy.

Validation errors mean the input violates a standing assumption of the theory
(exit code 1 in the CLI). Numeric errors mean a computation could not be
carried out (exit code 2). ``InconclusiveError`` means the numerics ran but
could not decide (exit code 3).
"""


class OpstableError(Exception):
    exit_code = 1


class ValidationError(OpstableError, ValueError):
    exit_code = 1


class NonSquare(ValidationError):
    pass


class NonFinite(ValidationError):
    pass


class DimensionOne(ValidationError):
    pass


class InvalidSpectrum(ValidationError):
    pass


class DegenerateSpectrum(ValidationError):
    pass


class UnsupportedDim(ValidationError):
    pass


class BelowCutoff(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class EmptyGrid(ValidationError):
    pass


class NumericError(OpstableError, ArithmeticError):
    exit_code = 2


class NumericOverflow(NumericError):
    pass


class BudgetExceeded(NumericError):
    pass


class QuadratureFailure(NumericError):
    pass


class NoBracket(NumericError):
    pass


class InconclusiveError(OpstableError):
    exit_code = 3
