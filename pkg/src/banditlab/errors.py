"""Exception types shared across the library."""

from __future__ import annotations


class BanditLabError(Exception):
    """Base class for all library-specific errors."""


class DomainError(BanditLabError):
    """An argument left the mathematical domain of a formula."""


class NonUniqueOptimum(BanditLabError):
    """Two or more arms tie for the highest mean reward."""


class BudgetTooSmall(BanditLabError):
    """The budget cannot accommodate the policy's schedule."""


class Stopped(BanditLabError):
    """A fixed-confidence policy was asked to act after stopping."""


class Incomplete(BanditLabError):
    """A recommendation was requested before the schedule completed."""


class ConditionViolated(BanditLabError):
    """A bound's side condition fails (reported, not raised by evaluators)."""


class ParseError(BanditLabError):
    """A data file failed to parse; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptySelection(BanditLabError):
    """A dataset filter retained no arms."""


class UnknownKinase(BanditLabError):
    """The requested kinase column is absent from the inhibition table."""


class SchemaMismatch(BanditLabError):
    """A CSV does not match the documented schema."""
