"""Classify S-expressions into KRSS forms and build model values."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Any, Sequence

from ..errors import ArityError, KRSSError, KRSSTypeError, Span, UnknownHead
from ..model import concepts as C
from ..model.kb import (
    INTEGER,
    REAL,
    AboxInit,
    AttrFiller,
    AttributeDecl,
    Disjoint,
    Equiv,
    GCI,
    InstanceOf,
    Related,
    RoleDecl,
)
from ..query import ast as Q
from .lexer import Token
from .sexpr import Atom, ReadError, SExpr, SList, read, read_document


class FormKind(enum.Enum):
    TBOX_AXIOM = "TBoxAxiom"
    ROLE_DECL = "RoleDecl"
    ATTRIBUTE_DECL = "AttributeDecl"
    CONCEPT_ASSERTION = "ConceptAssertion"
    ROLE_ASSERTION = "RoleAssertion"
    ATTRIBUTE_FILLER = "AttributeFiller"
    RULE_DEF = "RuleDef"
    ABOX_INIT = "AboxInit"
    QUERY = "Query"


@dataclass(frozen=True)
class ParsedForm:
    kind: FormKind
    payload: Any
    span: Span

    def __str__(self) -> str:
        return str(self.payload)


@dataclass(frozen=True)
class Diagnostic:
    error: KRSSError
    span: Span

    def __str__(self) -> str:
        return f"{self.span}: {self.error.kind}: {self.error.message}"


# ------------------------------------------------------------------ helpers


def _symbol(sx: SExpr, what: str) -> str:
    if isinstance(sx, Atom) and sx.is_symbol:
        return sx.text
    raise KRSSTypeError(f"expected {what} (a symbol), got {sx}", sx.span)


def _number(sx: SExpr, what: str = "number"):
    if isinstance(sx, Atom) and sx.is_number:
        return sx.value
    raise KRSSTypeError(f"expected {what}, got {sx}", sx.span)


def _arity(sx: SList, head: str, lo: int, hi: int | None = None) -> None:
    got = len(sx.items) - 1
    if got < lo or (hi is not None and got > hi):
        if hi is None:
            expected = f"at least {lo}"
        elif lo == hi:
            expected = str(lo)
        else:
            expected = f"{lo}-{hi}"
        raise ArityError(head, expected, got, sx.span)


_TOP_NAMES = {"top", "*top*", "TOP", "Thing"}
_BOTTOM_NAMES = {"bottom", "*bottom*", "BOTTOM", "Nothing"}
_CARD_RE = re.compile(r"(=|>=|<=)(\d+)\Z")
_CMP_HEADS = {"<", "<=", "=", ">=", ">"}


def parse_concept(sx: SExpr) -> C.Concept:
    """Concept expression per the KRSS constructors used in the corpus."""
    if isinstance(sx, Atom):
        if not sx.is_symbol:
            raise KRSSTypeError(f"expected a concept, got {sx}", sx.span)
        if sx.text in _TOP_NAMES:
            return C.TOP
        if sx.text in _BOTTOM_NAMES:
            return C.BOTTOM
        return C.Name(sx.text)
    head = sx.head
    if head is None:
        raise KRSSTypeError(f"expected a concept constructor, got {sx}", sx.span)
    args = sx.items[1:]
    if head == "not":
        _arity(sx, head, 1, 1)
        return C.Not(parse_concept(args[0]))
    if head in ("and", "or"):
        _arity(sx, head, 1)
        parts = tuple(parse_concept(a) for a in args)
        return C.And(parts) if head == "and" else C.Or(parts)
    if head in ("some", "all"):
        _arity(sx, head, 2, 2)
        role = _symbol(args[0], "role name")
        filler = parse_concept(args[1])
        return C.Some(role, filler) if head == "some" else C.All(role, filler)
    if head in ("at-least", "at-most", "exactly"):
        _arity(sx, head, 2, 3)
        n = _cardinal(args[0])
        return _cardinality(head, n, args[1:], sx)
    m = _CARD_RE.match(head)
    if m:
        _arity(sx, head, 1, 2)
        kind = {"=": "exactly", ">=": "at-least", "<=": "at-most"}[m.group(1)]
        return _cardinality(kind, int(m.group(2)), args, sx)
    if head in ("min", "max"):
        _arity(sx, head, 2, 2)
        attr = _symbol(args[0], "attribute name")
        value = _number(args[1], "numeric bound")
        return C.AttrCmp(attr, ">=" if head == "min" else "<=", value)
    if head in _CMP_HEADS:
        _arity(sx, head, 2, 2)
        return _comparison(head, args[0], args[1], sx)
    if head in ("a", "an", "no"):
        _arity(sx, head, 1, 1)
        attr = _symbol(args[0], "attribute name")
        return C.HasAttr(attr) if head != "no" else C.Not(C.HasAttr(attr))
    raise UnknownHead(f"unknown concept constructor {head!r}", sx.span)


def _cardinal(sx: SExpr) -> int:
    if isinstance(sx, Atom) and sx.kind == "INT" and sx.value >= 0:
        return sx.value
    raise KRSSTypeError(f"expected a non-negative integer, got {sx}", sx.span)


def _cardinality(kind: str, n: int, rest: Sequence[SExpr], sx: SList) -> C.Concept:
    role = _symbol(rest[0], "role name")
    filler = parse_concept(rest[1]) if len(rest) > 1 else C.TOP
    if kind == "at-least":
        return C.AtLeast(n, role, filler)
    if kind == "at-most":
        return C.AtMost(n, role, filler)
    return C.exactly(n, role, filler)


def _comparison(op: str, a: SExpr, b: SExpr, sx: SList) -> C.Concept:
    for side in (a, b):
        if isinstance(side, SList):
            raise KRSSTypeError(
                f"arithmetic {side} is not allowed inside a concept; "
                "state derived attributes with define-rule instead",
                side.span,
            )
    if isinstance(a, Atom) and a.is_symbol and isinstance(b, Atom) and b.is_number:
        return C.AttrCmp(a.text, op, b.value)
    if isinstance(a, Atom) and a.is_number and isinstance(b, Atom) and b.is_symbol:
        # (op constant attribute) reads as attribute CONVERSE(op) constant
        return C.AttrCmp(b.text, C.CONVERSE[op], a.value)
    raise KRSSTypeError(
        f"comparison {sx} needs one attribute and one numeric constant", sx.span
    )


def _keywords(items: Sequence[SExpr], allowed: set[str]) -> dict[str, SExpr]:
    out: dict[str, SExpr] = {}
    i = 0
    while i < len(items):
        kw = items[i]
        if not (isinstance(kw, Atom) and kw.is_keyword):
            raise KRSSTypeError(f"expected a keyword, got {kw}", kw.span)
        if kw.text not in allowed:
            raise KRSSTypeError(f"unknown keyword {kw.text}", kw.span)
        if i + 1 >= len(items):
            raise KRSSTypeError(f"keyword {kw.text} has no value", kw.span)
        out[kw.text] = items[i + 1]
        i += 2
    return out


def _bool(sx: SExpr) -> bool:
    if isinstance(sx, Atom) and sx.is_symbol and sx.text.lower() in ("t", "nil"):
        return sx.text.lower() == "t"
    raise KRSSTypeError(f"expected t or nil, got {sx}", sx.span)


# ------------------------------------------------------------------ rules


def _term(sx: SExpr):
    if isinstance(sx, Atom):
        if sx.is_number:
            return sx.value
        if sx.is_symbol:
            return Q.Var(sx.text) if sx.text.startswith("?") else sx.text
    raise KRSSTypeError(f"expected a variable, individual or number, got {sx}", sx.span)


def _expr(sx: SExpr, known: set[str]):
    if isinstance(sx, Atom):
        if sx.is_number:
            return sx.value
        if sx.is_symbol:
            if sx.text.startswith("?"):
                return Q.Var(sx.text)
            # bare symbol standing for a body variable, e.g. h2 for ?h2
            if "?" + sx.text in known:
                return Q.Var("?" + sx.text)
            raise KRSSTypeError(f"unknown symbol {sx.text!r} in arithmetic expression", sx.span)
        raise KRSSTypeError(f"bad expression {sx}", sx.span)
    op = sx.head
    if op not in ("+", "-", "*", "/"):
        raise KRSSTypeError(f"expected an arithmetic expression, got {sx}", sx.span)
    _arity(sx, op, 1 if op in ("+", "*") else 2, None if op in ("+", "*") else 2)
    return Q.Arith(op, tuple(_expr(a, known) for a in sx.items[1:]))


def _atom_shape(sx: SExpr) -> str:
    if not isinstance(sx, SList) or not sx.items:
        raise KRSSTypeError(f"expected an atom, got {sx}", sx.span)
    if sx.head in _CMP_HEADS:
        return "compare"
    if len(sx.items) == 2:
        return "concept"
    if len(sx.items) == 3:
        return "binary"
    raise KRSSTypeError(f"cannot read {sx} as a query/rule atom", sx.span)


def _body_items(sx: SExpr) -> list[SExpr]:
    if isinstance(sx, SList) and sx.head == "and":
        return list(sx.items[1:])
    return [sx]


def _vars_in(sx: SExpr) -> set[str]:
    if isinstance(sx, Atom):
        return {sx.text} if sx.is_symbol and sx.text.startswith("?") else set()
    out: set[str] = set()
    for x in sx.items:
        out |= _vars_in(x)
    return out


def parse_body(sx: SExpr) -> tuple:
    items = _body_items(sx)
    known: set[str] = set()
    for item in items:
        if isinstance(item, SList) and item.head not in _CMP_HEADS:
            known |= _vars_in(item)
    atoms = []
    for item in items:
        shape = _atom_shape(item)
        if shape == "compare":
            _arity(item, item.head, 2, 2)
            atoms.append(Q.Compare(_expr(item[1], known), item.head, _expr(item[2], known)))
        elif shape == "concept":
            atoms.append(Q.ConceptAtom(_term(item[0]), parse_concept(item[1])))
        else:
            atoms.append(
                Q.BinaryAtom(_term(item[0]), _term(item[1]), _predicate(item[2]))
            )
    return tuple(atoms)


def parse_rule_head(sx: SExpr, known: set[str]):
    shape = _atom_shape(sx)
    if shape == "concept":
        return Q.ConceptAtom(_term(sx[0]), parse_concept(sx[1]))
    if shape == "binary":
        obj = sx[1]
        value = _expr(obj, known) if isinstance(obj, SList) else _term(obj)
        return Q.BinaryAtom(_term(sx[0]), value, _predicate(sx[2]))
    raise KRSSTypeError(f"a comparison cannot be a rule head: {sx}", sx.span)


def _predicate(sx: SExpr) -> str:
    name = _symbol(sx, "role or attribute")
    if name.startswith("?"):
        raise KRSSTypeError(f"the predicate of an atom must be a role or attribute, got variable {name}", sx.span)
    return name


# ------------------------------------------------------------------ forms


def _form_tbox(sx: SList, head: str):
    if head in ("implies", "define-primitive-concept"):
        _arity(sx, head, 2, 2)
        return FormKind.TBOX_AXIOM, GCI(parse_concept(sx[1]), parse_concept(sx[2]))
    if head in ("equivalent", "equiv", "define-concept"):
        _arity(sx, head, 2, 2)
        return FormKind.TBOX_AXIOM, Equiv(parse_concept(sx[1]), parse_concept(sx[2]))
    _arity(sx, head, 2)
    return FormKind.TBOX_AXIOM, Disjoint(tuple(parse_concept(x) for x in sx.items[1:]))


def _form_role(sx: SList, head: str):
    _arity(sx, head, 1)
    name = _symbol(sx[1], "role name")
    kw = _keywords(sx.items[2:], {":transitive", ":domain", ":range"})
    return FormKind.ROLE_DECL, RoleDecl(
        name,
        transitive=_bool(kw[":transitive"]) if ":transitive" in kw else False,
        domain=parse_concept(kw[":domain"]) if ":domain" in kw else None,
        range=parse_concept(kw[":range"]) if ":range" in kw else None,
    )


def _form_attribute(sx: SList, head: str):
    _arity(sx, head, 1)
    name = _symbol(sx[1], "attribute name")
    kw = _keywords(sx.items[2:], {":domain", ":type"})
    value_type = REAL
    if ":type" in kw:
        t = _symbol(kw[":type"], "type").lower()
        if t not in (INTEGER, REAL):
            raise KRSSTypeError(f"unsupported attribute type {t}", kw[":type"].span)
        value_type = t
    domain = parse_concept(kw[":domain"]) if ":domain" in kw else None
    return FormKind.ATTRIBUTE_DECL, AttributeDecl(name, domain, value_type)


def _form_instance(sx: SList, head: str):
    _arity(sx, head, 2, 2)
    return FormKind.CONCEPT_ASSERTION, InstanceOf(_symbol(sx[1], "individual"), parse_concept(sx[2]))


def _form_related(sx: SList, head: str):
    _arity(sx, head, 3, 3)
    return FormKind.ROLE_ASSERTION, Related(
        _symbol(sx[1], "individual"), _symbol(sx[2], "individual"), _symbol(sx[3], "role name")
    )


def _form_filler(sx: SList, head: str):
    _arity(sx, head, 3, 3)
    return FormKind.ATTRIBUTE_FILLER, AttrFiller(
        _symbol(sx[1], "individual"), _number(sx[2], "attribute value"), _symbol(sx[3], "attribute name")
    )


def _form_rule(sx: SList, head: str):
    _arity(sx, head, 2, 2)
    body = parse_body(sx[2])
    known = set()
    for item in _body_items(sx[2]):
        known |= _vars_in(item)
    return FormKind.RULE_DEF, Q.RuleDef(parse_rule_head(sx[1], known), body)


def _form_abox(sx: SList, head: str):
    _arity(sx, head, 1, 1)
    return FormKind.ABOX_INIT, AboxInit(_symbol(sx[1], "ABox name"))


_NULLARY = {
    "tbox-cyclic?": Q.TBoxCyclic,
    "tbox-coherent?": Q.TBoxCoherent,
    "abox-consistent?": Q.AboxConsistent,
}
_NAMED = {
    "describe-individual": Q.DescribeIndividual,
    "concept-children": Q.ConceptChildren,
    "concept-descendants": Q.ConceptDescendants,
    "concept-descendents": Q.ConceptDescendants,
    "concept-parents": Q.ConceptParents,
    "concept-ancestors": Q.ConceptAncestors,
}


def _form_query(sx: SList, head: str):
    if head in _NULLARY:
        _arity(sx, head, 0, 0)
        return FormKind.QUERY, _NULLARY[head]()
    if head in _NAMED:
        _arity(sx, head, 1, 1)
        return FormKind.QUERY, _NAMED[head](_symbol(sx[1], "name"))
    if head == "concept-instances":
        _arity(sx, head, 1, 1)
        return FormKind.QUERY, Q.ConceptInstances(parse_concept(sx[1]))
    if head == "concept-satisfiable?":
        _arity(sx, head, 1, 1)
        return FormKind.QUERY, Q.ConceptSatisfiable(parse_concept(sx[1]))
    if head == "concept-subsumes?":
        _arity(sx, head, 2, 2)
        return FormKind.QUERY, Q.ConceptSubsumes(parse_concept(sx[1]), parse_concept(sx[2]))
    if head == "individual-instance?":
        _arity(sx, head, 2, 2)
        return FormKind.QUERY, Q.IndividualInstance(_symbol(sx[1], "individual"), parse_concept(sx[2]))
    # retrieve
    _arity(sx, head, 2, 2)
    vars_sx = sx[1]
    if not isinstance(vars_sx, SList):
        raise KRSSTypeError("retrieve expects a list of head variables", vars_sx.span)
    head_vars = []
    for v in vars_sx.items:
        name = _symbol(v, "variable")
        if not name.startswith("?"):
            raise KRSSTypeError(f"head variable must start with '?': {name}", v.span)
        head_vars.append(Q.Var(name))
    body = parse_body(sx[2])
    bad = Q.check_safe(set(head_vars), body)
    if bad:
        raise KRSSTypeError(
            f"query is not DL-safe; unbound: {', '.join(map(str, bad))}", sx.span
        )
    return FormKind.QUERY, Q.Conjunctive(tuple(head_vars), body)


_HEADS = {
    "implies": _form_tbox,
    "define-primitive-concept": _form_tbox,
    "equivalent": _form_tbox,
    "equiv": _form_tbox,
    "define-concept": _form_tbox,
    "disjoint": _form_tbox,
    "define-primitive-role": _form_role,
    "define-concrete-domain-attribute": _form_attribute,
    "instance": _form_instance,
    "related": _form_related,
    "attribute-filler": _form_filler,
    "attribute-value": _form_filler,
    "define-rule": _form_rule,
    "init-abox": _form_abox,
    "retrieve": _form_query,
    "concept-instances": _form_query,
    "concept-satisfiable?": _form_query,
    "concept-subsumes?": _form_query,
    "individual-instance?": _form_query,
    **{k: _form_query for k in _NULLARY},
    **{k: _form_query for k in _NAMED},
}

HEAD_SYMBOLS = frozenset(_HEADS)


def parse_sexpr(sx: SExpr) -> ParsedForm:
    if not isinstance(sx, SList):
        raise KRSSTypeError(f"expected a form, got {sx}", sx.span)
    head = sx.head
    if head is None:
        raise KRSSTypeError(f"form must start with a symbol: {sx}", sx.span)
    handler = _HEADS.get(head)
    if handler is None:
        raise UnknownHead(f"unknown form {head!r}", sx.items[0].span)
    kind, payload = handler(sx, head)
    return ParsedForm(kind, payload, sx.span)


def parse_form(tokens: Sequence[Token] | str) -> ParsedForm:
    """Parse one complete form from tokens (or text, for convenience)."""
    if isinstance(tokens, str):
        from .lexer import tokenize

        tokens = tokenize(tokens)
    return parse_sexpr(read(tokens))


def parse_document(text: str) -> tuple[list[ParsedForm], list[Diagnostic]]:
    """Parse every top-level form; a bad form yields one diagnostic."""
    forms: list[ParsedForm] = []
    diagnostics: list[Diagnostic] = []
    for item in read_document(text):
        if isinstance(item, ReadError):
            diagnostics.append(Diagnostic(item.error, item.span))
            continue
        try:
            forms.append(parse_sexpr(item))
        except KRSSError as exc:
            span = item.span
            if exc.span is not None and span.contains(exc.span):
                span = exc.span
            diagnostics.append(Diagnostic(exc, span))
    return forms, diagnostics
