"""Tokenizer for KRSS text."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from ..errors import IllegalCharacter, Span

LPAREN = "LPAREN"
RPAREN = "RPAREN"
SYMBOL = "SYMBOL"
KEYWORD = "KEYWORD"
INT = "INT"
REAL = "REAL"
ERROR = "ERROR"

_PUNCT = set("-_.:?*+=<>!/%&^~@$'")
_INT_RE = re.compile(r"[+-]?\d+\Z")
_REAL_RE = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+(?=[eE]))([eE][+-]?\d+)?\Z")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def value(self):
        if self.kind == INT:
            return int(self.text)
        if self.kind == REAL:
            return float(self.text)
        return self.text

    @property
    def span(self) -> Span:
        return Span(self.line, self.col, self.line, self.col + max(len(self.text), 1) - 1)

    def __repr__(self) -> str:
        if self.kind in (LPAREN, RPAREN):
            return self.kind
        return f"{self.kind.lower()}({self.text})"


def is_symbol_char(ch: str) -> bool:
    return ch.isalnum() or ch in _PUNCT


def classify_atom(text: str) -> str:
    if _INT_RE.match(text):
        return INT
    if _REAL_RE.match(text):
        return REAL
    if text.startswith(":") and len(text) > 1:
        return KEYWORD
    return SYMBOL


def iter_tokens(text: str, lenient: bool = False) -> Iterator[Token]:
    """Yield tokens with 1-based positions.

    With ``lenient`` an illegal character becomes an ERROR token instead of
    raising, which lets the document reader recover.
    """
    i, n = 0, len(text)
    line, col = 1, 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line, col = line + 1, 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            yield Token(LPAREN, ch, line, col)
            i += 1
            col += 1
            continue
        if ch == ")":
            yield Token(RPAREN, ch, line, col)
            i += 1
            col += 1
            continue
        if is_symbol_char(ch):
            j = i
            while j < n and is_symbol_char(text[j]):
                j += 1
            word = text[i:j]
            yield Token(classify_atom(word), word, line, col)
            col += j - i
            i = j
            continue
        if not lenient:
            raise IllegalCharacter(f"illegal character {ch!r}", Span(line, col, line, col))
        yield Token(ERROR, ch, line, col)
        i += 1
        col += 1


def tokenize(text: str) -> list[Token]:
    """All tokens of ``text``; raises IllegalCharacter on the first bad char."""
    return list(iter_tokens(text))
