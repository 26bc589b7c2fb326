"""Exception types shared across the package."""
from __future__ import annotations


class PersuasionLabError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(PersuasionLabError):
    """Operands disagree on states, actions, or messages."""


class InvariantViolation(PersuasionLabError):
    """A constructed object violates its declared invariants."""


class GameFormatError(PersuasionLabError):
    """A JSON input failed validation; ``field`` names the offending entry."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class LPFailure(PersuasionLabError):
    """The LP kernel returned an unusable status."""

    def __init__(self, message: str, status: str | None = None):
        super().__init__(message)
        self.status = status


class NotObedientError(PersuasionLabError):
    """An operation that requires an obedient experiment received one without a witness."""


class TheoremViolation(PersuasionLabError):
    """A certified step of the no-gain construction failed.

    This firing on a valid binary instance is either a bug or a
    counterexample; ``diagnostics`` carries everything needed to replay it.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
