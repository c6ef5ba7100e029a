"""Loading KRSS documents into one knowledge base."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import WindKBError
from .krss.forms import FormKind, parse_document
from .model.kb import KnowledgeBase


@dataclass
class LoadDiagnostic:
    source: str
    span: object
    kind: str
    message: str

    def __str__(self) -> str:
        where = f"{self.source}:{self.span}" if self.span is not None else self.source
        return f"{where}: {self.kind}: {self.message}"


@dataclass
class Loaded:
    kb: KnowledgeBase
    queries: list = field(default_factory=list)
    diagnostics: list[LoadDiagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def load_text(
    text: str,
    source: str = "<text>",
    kb: Optional[KnowledgeBase] = None,
    into: Optional[Loaded] = None,
) -> Loaded:
    """Parse ``text`` and add every well-formed form to ``kb``.

    Parse errors and model errors (conflicting declarations, ill-typed
    fillers) become diagnostics; loading continues with the next form.
    """
    out = into if into is not None else Loaded(kb if kb is not None else KnowledgeBase())
    forms, diags = parse_document(text)
    for d in diags:
        out.diagnostics.append(LoadDiagnostic(source, d.span, d.error.kind, d.error.message))
    for form in forms:
        if form.kind is FormKind.QUERY:
            out.queries.append(form.payload)
            continue
        try:
            out.kb.add_form(form)
        except WindKBError as e:
            out.diagnostics.append(LoadDiagnostic(source, form.span, type(e).__name__, str(e)))
    return out


def load_files(
    paths: Iterable[Union[str, Path]], strict: bool = False, kb: Optional[KnowledgeBase] = None
) -> Loaded:
    out = Loaded(kb if kb is not None else KnowledgeBase(strict=strict))
    for p in paths:
        p = Path(p)
        load_text(p.read_text(encoding="utf-8"), str(p), into=out)
    return out
