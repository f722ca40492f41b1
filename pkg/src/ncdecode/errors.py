"""Exception hierarchy shared by the package and mapped to CLI exit codes."""

from __future__ import annotations


class NCDecodeError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ParseError(NCDecodeError):
    """Malformed instance/received document. Carries a 1-based position when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ValidationError(NCDecodeError):
    """Document is well-formed but violates a semantic invariant."""


class DemandNotCovered(ValidationError):
    """A demanded message does not appear in any encoding map at the sink."""


class NotDecodable(NCDecodeError):
    """The received data does not determine the demanded messages uniquely."""

    exit_code = 2


class Inconsistent(NCDecodeError):
    """No message vector reproduces the received data."""

    exit_code = 3


class OracleMismatch(NCDecodeError):
    exit_code = 4


class SizeGuardExceeded(NCDecodeError):
    """Brute-force enumeration refused: the configuration space is too large."""
