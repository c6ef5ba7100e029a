"""Canonical KRSS rendering.

Model values already render themselves; this module adds the form-level entry
point and a multi-line layout for long axioms.
"""
from __future__ import annotations

from .forms import ParsedForm
from .lexer import tokenize
from .sexpr import Atom, SList, read


def print_form(form: ParsedForm | object) -> str:
    """Single-line canonical text that re-parses to an equal payload."""
    payload = form.payload if isinstance(form, ParsedForm) else form
    return str(payload)


def print_document(forms) -> str:
    return "".join(print_form(f) + "\n" for f in forms)


def pretty(text: str, width: int = 78, indent: int = 2) -> str:
    """Break a canonical form over lines when it exceeds ``width``."""
    return _layout(read(tokenize(text)), width, 0, indent)


def _layout(sx, width: int, column: int, indent: int) -> str:
    flat = str(sx)
    if isinstance(sx, Atom) or column + len(flat) <= width or len(sx.items) < 3:
        return flat
    head = str(sx.items[0])
    first = _layout(sx.items[1], width, column + len(head) + 2, indent)
    pad = " " * (column + len(head) + 2)
    rest = [_layout(x, width, len(pad), indent) for x in sx.items[2:]]
    return f"({head} {first}" + "".join("\n" + pad + r for r in rest) + ")"


__all__ = ["print_form", "print_document", "pretty", "SList"]
