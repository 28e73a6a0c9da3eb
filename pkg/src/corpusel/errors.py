"""Shared exception types."""
from __future__ import annotations


class CorpuselError(Exception):
    """Base class for all errors raised by this package."""


class RecordError(CorpuselError):
    """A record in an input stream is malformed or fails validation.

    ``line_no`` is 1-based and refers to the offending line of the source.
    """

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class DuplicateIdError(CorpuselError):
    """An identifier that must be unique occurred more than once."""

    def __init__(self, id: str, message: str | None = None):
        self.id = id
        super().__init__(message or f"duplicate id: {id!r}")


class UnknownIdError(CorpuselError):
    """An operation referenced an identifier that does not exist."""

    def __init__(self, id: str, message: str | None = None):
        self.id = id
        super().__init__(message or f"unknown id: {id!r}")


class ConflictError(CorpuselError):
    """The target exists but the current state does not allow the operation."""

