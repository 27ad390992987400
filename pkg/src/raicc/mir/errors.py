"""MIR error types."""
from __future__ import annotations


class MirError(Exception):
    """Base class for MIR input errors; carries an optional source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"{self.line}:{self.column}: {self.message}"

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": self.message,
                "line": self.line, "column": self.column}


class ParseError(MirError):
    """Grammar violation in MIR source."""


class ValidationError(MirError):
    """Well-formed MIR that violates a model invariant."""
