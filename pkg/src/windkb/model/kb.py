"""TBox/ABox data model and the load-phase ``KnowledgeBase`` container."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Union

from ..errors import (
    ConflictingDeclaration,
    KBError,
    NonSafeRule,
    UndeclaredSymbol,
    ValueTypeError,
)
from .concepts import (
    Concept,
    Number,
    attributes_used,
    concept_names,
    format_number,
    roles_used,
)

log = logging.getLogger(__name__)

INTEGER = "integer"
REAL = "real"
DEFAULT_ABOX = "default"


# ------------------------------------------------------------ declarations


@dataclass(frozen=True)
class RoleDecl:
    name: str
    transitive: bool = False
    domain: Optional[Concept] = None
    range: Optional[Concept] = None

    def __str__(self) -> str:
        parts = [f"(define-primitive-role {self.name}"]
        if self.domain is not None:
            parts.append(f":domain {self.domain}")
        if self.range is not None:
            parts.append(f":range {self.range}")
        if self.transitive:
            parts.append(":transitive t")
        return " ".join(parts) + ")"


@dataclass(frozen=True)
class AttributeDecl:
    name: str
    domain: Optional[Concept] = None
    value_type: str = REAL

    def __post_init__(self):
        if self.value_type not in (INTEGER, REAL):
            raise ValueError(f"unsupported attribute type {self.value_type!r}")

    def __str__(self) -> str:
        parts = [f"(define-concrete-domain-attribute {self.name}"]
        if self.domain is not None:
            parts.append(f":domain {self.domain}")
        parts.append(f":type {self.value_type}")
        return " ".join(parts) + ")"


# ------------------------------------------------------------ TBox axioms


@dataclass(frozen=True)
class GCI:
    lhs: Concept
    rhs: Concept

    def __str__(self) -> str:
        return f"(implies {self.lhs} {self.rhs})"

    def concepts(self) -> tuple[Concept, ...]:
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class Equiv:
    lhs: Concept
    rhs: Concept

    def __str__(self) -> str:
        return f"(equivalent {self.lhs} {self.rhs})"

    def concepts(self) -> tuple[Concept, ...]:
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class Disjoint:
    members: tuple[Concept, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))

    def __str__(self) -> str:
        return "(disjoint " + " ".join(map(str, self.members)) + ")"

    def concepts(self) -> tuple[Concept, ...]:
        return self.members


TBoxAxiom = Union[GCI, Equiv, Disjoint]


# ------------------------------------------------------------ ABox


@dataclass(frozen=True)
class InstanceOf:
    individual: str
    concept: Concept

    def __str__(self) -> str:
        return f"(instance {self.individual} {self.concept})"


@dataclass(frozen=True)
class Related:
    subject: str
    object: str
    role: str

    def __str__(self) -> str:
        return f"(related {self.subject} {self.object} {self.role})"


@dataclass(frozen=True)
class AttrFiller:
    individual: str
    value: Number
    attribute: str

    def __str__(self) -> str:
        return f"(attribute-filler {self.individual} {format_number(self.value)} {self.attribute})"


AboxAssertion = Union[InstanceOf, Related, AttrFiller]


@dataclass(frozen=True)
class AboxInit:
    name: str

    def __str__(self) -> str:
        return f"(init-abox {self.name})"


def individuals_of(assertion: AboxAssertion) -> tuple[str, ...]:
    if isinstance(assertion, Related):
        return (assertion.subject, assertion.object)
    return (assertion.individual,)


# ------------------------------------------------------------ container


@dataclass
class KnowledgeBase:
    """A TBox plus named ABoxes.

    Mutable during loading; reasoners key their caches on ``revision`` so any
    change invalidates them.
    """

    strict: bool = False
    roles: dict[str, RoleDecl] = field(default_factory=dict)
    attributes: dict[str, AttributeDecl] = field(default_factory=dict)
    axioms: dict[TBoxAxiom, None] = field(default_factory=dict)
    rules: list = field(default_factory=list)
    aboxes: dict[str, dict[AboxAssertion, None]] = field(default_factory=lambda: {DEFAULT_ABOX: {}})
    active_abox: str = DEFAULT_ABOX
    warnings: list[str] = field(default_factory=list)
    auto_declared: set[str] = field(default_factory=set)
    revision: int = 0

    # -- loading ---------------------------------------------------------

    def add_form(self, form) -> "KnowledgeBase":
        """Route one parsed form into the TBox or the active ABox."""
        from ..krss.forms import FormKind

        kind, payload = form.kind, form.payload
        if kind is FormKind.QUERY:
            return self
        self.add(payload)
        return self

    def add(self, item) -> "KnowledgeBase":
        from ..query.ast import RuleDef, check_safe

        if isinstance(item, RoleDecl):
            self.declare_role(item)
        elif isinstance(item, AttributeDecl):
            self.declare_attribute(item)
        elif isinstance(item, (GCI, Equiv, Disjoint)):
            for c in item.concepts():
                self._register_concept(c)
            self.axioms.setdefault(item, None)
        elif isinstance(item, InstanceOf):
            self._register_concept(item.concept)
            self._assert(item)
        elif isinstance(item, Related):
            self._use_role(item.role)
            self._assert(item)
        elif isinstance(item, AttrFiller):
            decl = self._use_attribute(item.attribute)
            if decl.value_type == INTEGER and not isinstance(item.value, int):
                raise ValueTypeError(
                    f"{item.attribute} is declared integer but got {format_number(item.value)}"
                )
            self._assert(item)
        elif isinstance(item, AboxInit):
            self.aboxes[item.name] = {}
            self.active_abox = item.name
        elif isinstance(item, RuleDef):
            bad = check_safe(item.head.vars(), item.body)
            if bad:
                raise NonSafeRule(f"variables not bound by a body atom: {', '.join(map(str, bad))}")
            self.rules.append(item)
        else:
            raise KBError(f"cannot add {item!r}")
        self.revision += 1
        return self

    def add_all(self, items: Iterable) -> "KnowledgeBase":
        for item in items:
            self.add(item)
        return self

    def _assert(self, assertion: AboxAssertion) -> None:
        self.aboxes[self.active_abox].setdefault(assertion, None)

    # -- declarations ----------------------------------------------------

    def declare_role(self, decl: RoleDecl) -> None:
        if decl.name in self.attributes:
            raise ConflictingDeclaration(f"{decl.name} is already used as an attribute")
        for c in (decl.domain, decl.range):
            if c is not None:
                self._register_concept(c)
        old = self.roles.get(decl.name)
        if old is not None and old != decl and decl.name not in self.auto_declared:
            raise ConflictingDeclaration(f"role {decl.name} redeclared: {old} vs {decl}")
        self.auto_declared.discard(decl.name)
        self.roles[decl.name] = decl

    def declare_attribute(self, decl: AttributeDecl) -> None:
        if decl.name in self.roles:
            raise ConflictingDeclaration(f"{decl.name} is already used as a role")
        if decl.domain is not None:
            self._register_concept(decl.domain)
        old = self.attributes.get(decl.name)
        if old is not None and old != decl and decl.name not in self.auto_declared:
            raise ConflictingDeclaration(f"attribute {decl.name} redeclared: {old} vs {decl}")
        if decl.name in self.auto_declared and decl.value_type == INTEGER:
            for a in self.all_assertions():
                if isinstance(a, AttrFiller) and a.attribute == decl.name and not isinstance(a.value, int):
                    raise ConflictingDeclaration(
                        f"{decl.name} declared integer after real filler {format_number(a.value)}"
                    )
        self.auto_declared.discard(decl.name)
        self.attributes[decl.name] = decl

    def _use_role(self, name: str) -> RoleDecl:
        if name in self.roles:
            return self.roles[name]
        if name in self.attributes:
            raise ConflictingDeclaration(f"{name} is an attribute but is used as a role")
        if self.strict:
            raise UndeclaredSymbol(f"role {name} is not declared")
        self._warn(f"auto-declared role {name}")
        self.auto_declared.add(name)
        decl = RoleDecl(name)
        self.roles[name] = decl
        return decl

    def _use_attribute(self, name: str) -> AttributeDecl:
        if name in self.attributes:
            return self.attributes[name]
        if name in self.roles:
            raise ConflictingDeclaration(f"{name} is a role but is used as an attribute")
        if self.strict:
            raise UndeclaredSymbol(f"attribute {name} is not declared")
        self._warn(f"auto-declared attribute {name} (type real)")
        self.auto_declared.add(name)
        decl = AttributeDecl(name)
        self.attributes[name] = decl
        return decl

    def _register_concept(self, c: Concept) -> None:
        for r in sorted(roles_used(c)):
            self._use_role(r)
        for a in sorted(attributes_used(c)):
            self._use_attribute(a)

    def _warn(self, message: str) -> None:
        log.warning(message)
        self.warnings.append(message)

    # -- views -----------------------------------------------------------

    @property
    def abox(self) -> dict[AboxAssertion, None]:
        return self.aboxes[self.active_abox]

    def assertions(self) -> list[AboxAssertion]:
        return list(self.abox)

    def all_assertions(self) -> Iterator[AboxAssertion]:
        for box in self.aboxes.values():
            yield from box

    def individuals(self) -> list[str]:
        seen: dict[str, None] = {}
        for a in self.abox:
            for ind in individuals_of(a):
                seen.setdefault(ind, None)
        return sorted(seen)

    def concept_names(self) -> list[str]:
        names: set[str] = set()
        for ax in self.axioms:
            for c in ax.concepts():
                names |= concept_names(c)
        for decl in self.roles.values():
            for c in (decl.domain, decl.range):
                if c is not None:
                    names |= concept_names(c)
        for decl in self.attributes.values():
            if decl.domain is not None:
                names |= concept_names(decl.domain)
        for a in self.abox:
            if isinstance(a, InstanceOf):
                names |= concept_names(a.concept)
        return sorted(names)

    def transitive_roles(self) -> frozenset[str]:
        return frozenset(r for r, d in self.roles.items() if d.transitive)

    def attribute_type(self, name: str) -> str:
        decl = self.attributes.get(name)
        return decl.value_type if decl else REAL

    def is_attribute(self, name: str) -> bool:
        return name in self.attributes

    def copy(self) -> "KnowledgeBase":
        return replace(
            self,
            roles=dict(self.roles),
            attributes=dict(self.attributes),
            axioms=dict(self.axioms),
            rules=list(self.rules),
            aboxes={k: dict(v) for k, v in self.aboxes.items()},
            warnings=list(self.warnings),
            auto_declared=set(self.auto_declared),
        )

    def tbox_signature(self) -> tuple:
        """Hashable snapshot of everything that affects TBox reasoning."""
        return (
            frozenset(self.axioms),
            frozenset(self.roles.values()),
            frozenset(self.attributes.values()),
        )
