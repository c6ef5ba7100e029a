"""Exception hierarchy shared by every windkb subsystem."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    """Inclusive line/column range (1-based) of a piece of source text."""

    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}-{self.end_line}:{self.end_col}"

    def contains(self, other: "Span") -> bool:
        return (self.line, self.col) <= (other.line, other.col) and (
            other.end_line,
            other.end_col,
        ) <= (self.end_line, self.end_col)


class WindKBError(Exception):
    """Base class for all errors raised by this package."""


class KRSSError(WindKBError):
    """A lexical or syntactic problem in KRSS text."""

    kind = "KRSSError"

    def __init__(self, message: str, span: Span | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        where = f" at {self.span}" if self.span else ""
        return f"{self.kind}{where}: {self.message}"


class IllegalCharacter(KRSSError):
    kind = "IllegalCharacter"


class UnbalancedForm(KRSSError):
    kind = "UnbalancedForm"


class UnknownHead(KRSSError):
    kind = "UnknownHead"


class ArityError(KRSSError):
    kind = "ArityError"

    def __init__(self, head: str, expected: str, got: int, span: Span | None = None):
        super().__init__(f"{head} expects {expected} argument(s), got {got}", span)
        self.head = head
        self.expected = expected
        self.got = got


class KRSSTypeError(KRSSError):
    """A well-formed S-expression used in the wrong syntactic role."""

    kind = "TypeError"


class KBError(WindKBError):
    """Problems while building a knowledge base."""


class ConflictingDeclaration(KBError):
    pass


class UndeclaredSymbol(KBError):
    pass


class ValueTypeError(KBError):
    """An attribute filler whose value does not match the declared type."""


class NonSafeRule(KBError):
    pass


class UnknownIndividual(KBError):
    pass


class UnsupportedAxiom(WindKBError):
    """An axiom outside the fragment the tableau engine decides."""

    def __init__(self, message: str, hint: str | None = None):
        super().__init__(message if hint is None else f"{message} (hint: {hint})")
        self.hint = hint


class SizeLimitExceeded(WindKBError):
    pass


class GeoError(WindKBError):
    pass


class UnresolvedLocation(GeoError):
    def __init__(self, individual: str, detail: str = ""):
        msg = f"cannot resolve a location for {individual}"
        super().__init__(f"{msg}: {detail}" if detail else msg)
        self.individual = individual


class DegenerateArea(GeoError):
    pass


class InvalidGeometry(GeoError):
    pass
