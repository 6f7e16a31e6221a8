"""Error types and structured warnings shared by all pipeline stages.

Every error carries a stable ``code`` so that front ends (CLI, HTTP service)
can map failures to their own contracts without string matching.  Warnings
are plain records, never exceptions: a stage that can continue emits a
:class:`WarningRecord` and keeps going.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class CtxmineError(Exception):
    """Base class for all errors raised by this package."""

    code = "ERROR"

    def details(self) -> list[dict[str, Any]]:
        """Structured context for error responses; empty when there is none."""
        return []


class ParseError(CtxmineError):
    """Malformed input text (CSV or JSON) that could not be tokenized."""

    code = "PARSE_ERROR"

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line

    def __str__(self) -> str:
        message = super().__str__()
        if self.line is not None:
            return f"line {self.line}: {message}"
        return message

    def details(self) -> list[dict[str, Any]]:
        if self.line is None:
            return []
        return [{"line": self.line}]


class ValidationError(CtxmineError):
    """Well-formed input that violates a declared contract."""

    code = "VALIDATION_ERROR"

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message)
        self.location = location

    def __str__(self) -> str:
        message = super().__str__()
        if self.location is not None:
            return f"{message} (at {self.location})"
        return message

    def details(self) -> list[dict[str, Any]]:
        if self.location is None:
            return []
        return [{"location": self.location}]


class DegenerateElement(CtxmineError):
    """An element pair has too little variety left to test.

    Raised by contingency-table construction when, after pairwise deletion of
    missing cells, either column has fewer than two distinct values.  Callers
    iterating over many pairs catch this and skip the pair with a warning.
    """

    code = "DEGENERATE_ELEMENT"


class SerializationError(CtxmineError):
    """A document violates its invariants and cannot be serialized."""

    code = "SERIALIZATION_ERROR"


class VersionError(CtxmineError):
    """An interchange document declares a version this build cannot read."""

    code = "VERSION_ERROR"


@dataclass(frozen=True)
class WarningRecord:
    """Machine-readable warning emitted by a pipeline stage.

    ``code`` is stable across releases and safe to branch on; ``message`` is
    human text; ``location`` names the offending column, pair, or line when
    one exists.
    """

    code: str
    message: str
    location: str | None = None
