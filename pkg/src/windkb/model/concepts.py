"""Concept expressions.

Every constructor is an immutable, hashable value so that concept sets can be
used directly as tableau node labels.  ``str(c)`` renders canonical KRSS text,
which doubles as the deterministic sort key used by the reasoner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Union

Number = Union[int, float]

COMPARISON_OPS = ("<", "<=", "=", ">=", ">")

# op applied with the operands swapped: (k op a) == (a CONVERSE[op] k)
CONVERSE = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}


def format_number(value: Number) -> str:
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


class Concept:
    """Base class. Subclasses are frozen dataclasses with a cached hash."""

    __slots__ = ()

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    def _init_cache(self) -> None:
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._fields()))
        object.__setattr__(self, "_text", None)

    def __str__(self) -> str:
        text = self._text  # type: ignore[attr-defined]
        if text is None:
            text = self._render()
            object.__setattr__(self, "_text", text)
        return text

    def _render(self) -> str:
        raise NotImplementedError

    def __lt__(self, other: "Concept") -> bool:
        return str(self) < str(other)

    def children(self) -> tuple["Concept", ...]:
        return ()


def _cached(cls):
    """Attach the hash/text cache slots to a frozen dataclass."""
    cls = dataclass(frozen=True, eq=True)(cls)
    original = cls.__init__
    field_eq = cls.__eq__

    def __init__(self, *args, **kwargs):
        original(self, *args, **kwargs)
        self._init_cache()

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or self._hash != other._hash:
            return False
        return field_eq(self, other)

    cls.__init__ = __init__
    cls.__eq__ = __eq__
    cls.__hash__ = Concept.__hash__
    return cls


@_cached
class Top(Concept):
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def _fields(self):
        return ()

    def _render(self):
        return "top"


@_cached
class Bottom(Concept):
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def _fields(self):
        return ()

    def _render(self):
        return "bottom"


TOP = Top()
BOTTOM = Bottom()


@_cached
class Name(Concept):
    name: str
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if not self.name:
            raise ValueError("concept name must be non-empty")

    def _fields(self):
        return (self.name,)

    def _render(self):
        return self.name


@_cached
class Not(Concept):
    arg: Concept
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def _fields(self):
        return (self.arg,)

    def _render(self):
        if isinstance(self.arg, HasAttr):
            return f"(no {self.arg.attr})"
        return f"(not {self.arg})"

    def children(self):
        return (self.arg,)


@_cached
class And(Concept):
    args: tuple[Concept, ...]
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("and needs at least one operand")

    def _fields(self):
        return self.args

    def _render(self):
        return "(and " + " ".join(map(str, self.args)) + ")"

    def children(self):
        return self.args


@_cached
class Or(Concept):
    args: tuple[Concept, ...]
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("or needs at least one operand")

    def _fields(self):
        return self.args

    def _render(self):
        return "(or " + " ".join(map(str, self.args)) + ")"

    def children(self):
        return self.args


@_cached
class Some(Concept):
    role: str
    filler: Concept
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def _fields(self):
        return (self.role, self.filler)

    def _render(self):
        return f"(some {self.role} {self.filler})"

    def children(self):
        return (self.filler,)


@_cached
class All(Concept):
    role: str
    filler: Concept
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def _fields(self):
        return (self.role, self.filler)

    def _render(self):
        return f"(all {self.role} {self.filler})"

    def children(self):
        return (self.filler,)


@_cached
class AtLeast(Concept):
    n: int
    role: str
    filler: Concept = TOP
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("cardinality must be non-negative")

    def _fields(self):
        return (self.n, self.role, self.filler)

    def _render(self):
        if self.filler == TOP:
            return f"(at-least {self.n} {self.role})"
        return f"(at-least {self.n} {self.role} {self.filler})"

    def children(self):
        return (self.filler,)


@_cached
class AtMost(Concept):
    n: int
    role: str
    filler: Concept = TOP
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("cardinality must be non-negative")

    def _fields(self):
        return (self.n, self.role, self.filler)

    def _render(self):
        if self.filler == TOP:
            return f"(at-most {self.n} {self.role})"
        return f"(at-most {self.n} {self.role} {self.filler})"

    def children(self):
        return (self.filler,)


@_cached
class AttrCmp(Concept):
    """``attribute op constant``; the attribute must have a value."""

    attr: str
    op: str
    value: Number
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.op not in COMPARISON_OPS:
            raise ValueError(f"unknown comparison {self.op!r}")
        if isinstance(self.value, bool) or not isinstance(self.value, (int, float)):
            raise ValueError("comparison constant must be a number")
        if not math.isfinite(self.value):
            raise ValueError("comparison constant must be finite")

    def _fields(self):
        return (self.attr, self.op, self.value)

    def _render(self):
        return f"({self.op} {self.attr} {format_number(self.value)})"

    def holds(self, x: Number) -> bool:
        v = self.value
        return {
            "<": x < v,
            "<=": x <= v,
            "=": x == v,
            ">=": x >= v,
            ">": x > v,
        }[self.op]


@_cached
class HasAttr(Concept):
    """The attribute has some value (KRSS ``(a attr)``)."""

    attr: str
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _text: str | None = field(init=False, repr=False, compare=False, default=None)

    def _fields(self):
        return (self.attr,)

    def _render(self):
        return f"(a {self.attr})"


def exactly(n: int, role: str, filler: Concept = TOP) -> Concept:
    return And((AtLeast(n, role, filler), AtMost(n, role, filler)))


# ---------------------------------------------------------------- traversal


def walk(c: Concept) -> Iterator[Concept]:
    stack = [c]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed(x.children()))


def concept_names(c: Concept) -> set[str]:
    return {x.name for x in walk(c) if isinstance(x, Name)}


def roles_used(c: Concept) -> set[str]:
    return {x.role for x in walk(c) if isinstance(x, (Some, All, AtLeast, AtMost))}


def attributes_used(c: Concept) -> set[str]:
    return {x.attr for x in walk(c) if isinstance(x, (AttrCmp, HasAttr))}


def constants_used(c: Concept) -> set[Number]:
    return {x.value for x in walk(c) if isinstance(x, AttrCmp)}


def cardinality_roles(c: Concept) -> set[str]:
    return {x.role for x in walk(c) if isinstance(x, (AtLeast, AtMost))}


def role_depth(c: Concept) -> int:
    if isinstance(c, (Some, All, AtLeast, AtMost)):
        return 1 + role_depth(c.filler)
    return max((role_depth(x) for x in c.children()), default=0)


# ---------------------------------------------------------------- NNF

_NEGATED_CMP = {
    "<": (">=",),
    "<=": (">",),
    "=": ("<", ">"),
    ">=": ("<",),
    ">": ("<=",),
}


@lru_cache(maxsize=None)
def nnf(c: Concept) -> Concept:
    """Negation normal form: negation only on names and ``HasAttr``."""
    if isinstance(c, (Top, Bottom, Name, AttrCmp, HasAttr)):
        return c
    if isinstance(c, And):
        return And(tuple(nnf(x) for x in c.args))
    if isinstance(c, Or):
        return Or(tuple(nnf(x) for x in c.args))
    if isinstance(c, Some):
        return Some(c.role, nnf(c.filler))
    if isinstance(c, All):
        return All(c.role, nnf(c.filler))
    if isinstance(c, AtLeast):
        if c.n == 0:
            return TOP
        return AtLeast(c.n, c.role, nnf(c.filler))
    if isinstance(c, AtMost):
        return AtMost(c.n, c.role, nnf(c.filler))
    if isinstance(c, Not):
        return negate(c.arg)
    raise TypeError(f"not a concept: {c!r}")


@lru_cache(maxsize=None)
def negate(c: Concept) -> Concept:
    """NNF of ``(not c)``."""
    if isinstance(c, Top):
        return BOTTOM
    if isinstance(c, Bottom):
        return TOP
    if isinstance(c, (Name, HasAttr)):
        return Not(c)
    if isinstance(c, Not):
        return nnf(c.arg)
    if isinstance(c, And):
        return Or(tuple(negate(x) for x in c.args))
    if isinstance(c, Or):
        return And(tuple(negate(x) for x in c.args))
    if isinstance(c, Some):
        return All(c.role, negate(c.filler))
    if isinstance(c, All):
        return Some(c.role, negate(c.filler))
    if isinstance(c, AtLeast):
        if c.n == 0:
            return BOTTOM
        return AtMost(c.n - 1, c.role, nnf(c.filler))
    if isinstance(c, AtMost):
        return AtLeast(c.n + 1, c.role, nnf(c.filler))
    if isinstance(c, AttrCmp):
        alternatives = [Not(HasAttr(c.attr))]
        alternatives += [AttrCmp(c.attr, op, c.value) for op in _NEGATED_CMP[c.op]]
        return Or(tuple(alternatives))
    raise TypeError(f"not a concept: {c!r}")


def is_nnf(c: Concept) -> bool:
    for x in walk(c):
        if isinstance(x, Not) and not isinstance(x.arg, (Name, HasAttr)):
            return False
    return True
