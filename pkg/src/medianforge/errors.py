"""Exception hierarchy.

Every error carries a ``witness`` dict so the CLI can put a replayable
counterexample into its report without parsing messages.
"""

from __future__ import annotations

from typing import Any


class MedianForgeError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, **witness: Any) -> None:
        super().__init__(message)
        self.witness = witness

    @property
    def kind(self) -> str:
        return type(self).__name__

    def as_dict(self) -> dict[str, Any]:
        return {"error": self.kind, "message": str(self), "witness": self.witness}


class InputError(MedianForgeError):
    """Malformed or inconsistent input description."""


class MalformedInput(InputError):
    pass


class EmptyPointSet(InputError):
    pass


class EmptySide(InputError):
    pass


class NotPartition(InputError):
    pass


class UnknownPoint(InputError):
    pass


class UnknownVertex(InputError):
    pass


class UnknownHyperplane(InputError):
    pass


class InconsistentInput(InputError):
    pass


class NotNested(InputError):
    pass


class EmptyDomain(InputError):
    pass


class InvalidAction(InputError):
    pass


class XiInsideTwoOuters(InputError):
    pass


class ValidationError(MedianForgeError):
    """The input parsed fine but is not the one-skeleton of a CAT(0) cube complex."""


class Disconnected(ValidationError):
    pass


class NotMedian(ValidationError):
    pass


class FlagViolation(ValidationError):
    pass


class SizeLimitExceeded(MedianForgeError):
    """An enumeration cap was hit; the input is too large, not invalid."""


class SearchExhausted(MedianForgeError):
    """A bounded search ended without a result; inconclusive, not a disproof."""
