"""Exception hierarchy shared by every fitdrift module."""

from __future__ import annotations


class FitDriftError(Exception):
    """Base class for all library errors."""


class ValidationError(FitDriftError, ValueError):
    """Input violates a documented precondition or invariant."""


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NegativeCount(ParseError):
    pass


class DuplicateYear(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class InvalidBinning(ValidationError):
    pass


class DegenerateBin(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class DegenerateSample(ValidationError):
    pass


class DegenerateIncrements(ValidationError):
    """All rescaled increments are identical, so the t statistic is undefined."""


class ZeroTimeStep(ValidationError):
    pass
