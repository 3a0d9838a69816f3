"""Exception types.

Subclasses of :class:`ValidationError` signal bad inputs (the CLI maps them to
exit status 1); everything else deriving from :class:`HermvarError` is a
runtime failure (exit status 2).
"""


class HermvarError(Exception):
    pass


class ValidationError(HermvarError, ValueError):
    pass


class DomainError(ValidationError):
    pass


class UnsupportedOrder(ValidationError):
    pass


class NyquistViolation(ValidationError):
    pass


class CoverageError(ValidationError):
    pass


class HorizonError(ValidationError):
    pass


class ResolutionError(ValidationError):
    pass


class TractabilityError(ValidationError):
    pass


class NonPositiveEigenvalue(HermvarError, ArithmeticError):
    pass


class RefinementError(HermvarError, ArithmeticError):
    pass


class DegenerateSample(HermvarError, ArithmeticError):
    pass
