"""S-expression trees built from KRSS tokens."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Union

from ..errors import IllegalCharacter, KRSSError, Span, UnbalancedForm
from .lexer import ERROR, INT, KEYWORD, LPAREN, REAL, RPAREN, SYMBOL, Token, iter_tokens


@dataclass(frozen=True)
class Atom:
    kind: str
    text: str
    span: Span

    @property
    def value(self):
        if self.kind == INT:
            return int(self.text)
        if self.kind == REAL:
            return float(self.text)
        return self.text

    @property
    def is_symbol(self) -> bool:
        return self.kind == SYMBOL

    @property
    def is_number(self) -> bool:
        return self.kind in (INT, REAL)

    @property
    def is_keyword(self) -> bool:
        return self.kind == KEYWORD

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple["SExpr", ...]
    span: Span

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom) and self.items[0].is_symbol:
            return self.items[0].text
        return None

    def __str__(self) -> str:
        return "(" + " ".join(str(x) for x in self.items) + ")"


SExpr = Union[Atom, SList]


def _atom(tok: Token) -> Atom:
    return Atom(tok.kind, tok.text, tok.span)


def read(tokens: Sequence[Token]) -> SExpr:
    """Read exactly one S-expression from a complete token sequence."""
    if not tokens:
        raise UnbalancedForm("empty input")
    pos = 0

    def parse() -> SExpr:
        nonlocal pos
        tok = tokens[pos]
        if tok.kind == RPAREN:
            raise UnbalancedForm("unexpected ')'", tok.span)
        if tok.kind == ERROR:
            raise IllegalCharacter(f"illegal character {tok.text!r}", tok.span)
        if tok.kind != LPAREN:
            pos += 1
            return _atom(tok)
        start = tok
        pos += 1
        items = []
        while True:
            if pos >= len(tokens):
                raise UnbalancedForm("unterminated form", Span(start.line, start.col, start.line, start.col))
            if tokens[pos].kind == RPAREN:
                end = tokens[pos]
                pos += 1
                return SList(tuple(items), Span(start.line, start.col, end.line, end.col))
            items.append(parse())

    result = parse()
    if pos != len(tokens):
        raise UnbalancedForm("trailing tokens after form", tokens[pos].span)
    return result


@dataclass(frozen=True)
class ReadError:
    error: KRSSError
    span: Span


def read_document(text: str) -> Iterator[SExpr | ReadError]:
    """Yield top-level forms, recovering from errors.

    A '(' in column 1 always starts a new top-level form, so an unterminated
    form costs one diagnostic instead of swallowing the rest of the file.
    """
    tokens = list(iter_tokens(text, lenient=True))
    i, n = 0, len(tokens)
    while i < n:
        tok = tokens[i]
        if tok.kind != LPAREN:
            if tok.kind == ERROR:
                err: KRSSError = IllegalCharacter(f"illegal character {tok.text!r}", tok.span)
            elif tok.kind == RPAREN:
                err = UnbalancedForm("unexpected ')'", tok.span)
            else:
                err = KRSSError(f"expected a form, found {tok.text!r}", tok.span)
            yield ReadError(err, tok.span)
            i += 1
            continue
        # collect one balanced form
        depth, j, bad = 0, i, None
        while j < n:
            t = tokens[j]
            if t.kind == LPAREN:
                if depth > 0 and t.col == 1:
                    break
                depth += 1
            elif t.kind == RPAREN:
                depth -= 1
                if depth == 0:
                    j += 1
                    break
            elif t.kind == ERROR and bad is None:
                bad = t
            j += 1
        chunk = tokens[i:j]
        last = chunk[-1]
        span = Span(tok.line, tok.col, last.line, last.col + len(last.text) - 1)
        if depth != 0:
            yield ReadError(UnbalancedForm("unterminated form", span), span)
        elif bad is not None:
            yield ReadError(IllegalCharacter(f"illegal character {bad.text!r}", bad.span), span)
        else:
            yield read(chunk)
        i = j
