"""Exception hierarchy.

Every error raised on purpose by the package derives from FracredError, so
callers can catch the whole family at once. Most also derive from the closest
builtin (ValueError, IndexError, ArithmeticError) so generic handlers still work.
"""


class FracredError(Exception):
    """Base class for all package errors."""


# model and input validation

class ValidationError(FracredError, ValueError):
    """Input failed validation. ``field`` names the offending field when known."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class LengthMismatch(ValidationError):
    pass


class NonPositiveParameter(ValidationError):
    pass


class IndexOutOfRange(FracredError, IndexError):
    pass


class PartitionMismatch(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class ParseError(FracredError, ValueError):
    """Malformed input file. Carries the 1-based ``line`` and ``column`` when known."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


# numerical failures

class NumericalError(FracredError, ArithmeticError):
    pass


class DomainError(NumericalError, ValueError):
    pass


class SingularMatrix(NumericalError):
    pass


class SingularSystem(SingularMatrix):
    """(i*omega*I - A) is singular: undamped model driven at a resonance."""


class SingularDynamicStiffness(SingularMatrix):
    pass


class PoleHit(NumericalError):
    pass


class Antiresonance(NumericalError):
    pass


class DegenerateArgument(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class IllConditionedFit(NumericalError):
    pass


class StepTooLarge(NumericalError):
    pass


class RankDeficient(NumericalError):
    pass


class UnboundedResponse(NumericalError):
    pass


class EmptySeries(FracredError, ValueError):
    pass
