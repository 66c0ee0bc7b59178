"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class SmcError(Exception):
    """Base class for all toolkit errors."""


class BitOutOfRange(SmcError):
    """A formula references a bit index outside the state width."""


class MissingNextState(SmcError):
    """A next-state variable was evaluated without a successor state."""


class IndexOutOfWindow(SmcError):
    """A state-sequence access fell outside the materialized window."""


class ParseError(SmcError):
    """Syntax error in an input document, with source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column


class UndeclaredVariable(ParseError):
    """A formula names a bit that the declared width does not provide."""


class NextInInit(ParseError):
    """A primed variable occurred where only current-state bits are legal."""


class WidthMismatch(ParseError):
    """Missing, repeated, or unusable width declaration."""


class ResourceLimit(SmcError):
    """The solver exceeded its conflict budget; distinct from unsat."""

    def __init__(self, conflicts: int):
        super().__init__(f"conflict budget exhausted after {conflicts} conflicts")
        self.conflicts = conflicts


class MalformedSolverOutput(SmcError):
    """An external solver transcript could not be interpreted."""


class WidthTooLarge(SmcError):
    """The state space is too wide for exhaustive enumeration."""


class NonClausalProperty(SmcError):
    """The property cannot be rendered as a conjunction of clauses."""


class CertificateParseError(ParseError):
    """A serialized frame certificate could not be parsed."""
