"""Finite interpretations and direct evaluation of concept extensions.

Used to verify tableau witnesses and oracle models; it shares no code with
either decision procedure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..model import concepts as C
from ..model.kb import (
    GCI,
    AttrFiller,
    Disjoint,
    Equiv,
    InstanceOf,
    KnowledgeBase,
    Related,
)


@dataclass
class Interpretation:
    size: int
    concepts: dict[str, set[int]] = field(default_factory=dict)
    roles: dict[str, set[tuple[int, int]]] = field(default_factory=dict)
    attributes: dict[str, dict[int, C.Number]] = field(default_factory=dict)
    individuals: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self._memo: dict[C.Concept, frozenset[int]] = {}
        self._succ: dict[str, dict[int, set[int]]] = {}

    @property
    def domain(self) -> range:
        return range(self.size)

    def invalidate(self) -> None:
        self._memo.clear()
        self._succ.clear()

    def successors(self, role: str, x: int) -> set[int]:
        table = self._succ.get(role)
        if table is None:
            table = {}
            for a, b in self.roles.get(role, ()):
                table.setdefault(a, set()).add(b)
            self._succ[role] = table
        return table.get(x, set())

    def extension(self, c: C.Concept) -> frozenset[int]:
        hit = self._memo.get(c)
        if hit is None:
            hit = frozenset(self._eval(c))
            self._memo[c] = hit
        return hit

    def _eval(self, c: C.Concept) -> Iterable[int]:
        dom = self.domain
        if isinstance(c, C.Top):
            return dom
        if isinstance(c, C.Bottom):
            return ()
        if isinstance(c, C.Name):
            return self.concepts.get(c.name, ())
        if isinstance(c, C.Not):
            inner = self.extension(c.arg)
            return [x for x in dom if x not in inner]
        if isinstance(c, C.And):
            out = set(dom)
            for a in c.args:
                out &= self.extension(a)
            return out
        if isinstance(c, C.Or):
            out = set()
            for a in c.args:
                out |= self.extension(a)
            return out
        if isinstance(c, C.Some):
            f = self.extension(c.filler)
            return [x for x in dom if self.successors(c.role, x) & f]
        if isinstance(c, C.All):
            f = self.extension(c.filler)
            return [x for x in dom if self.successors(c.role, x) <= f]
        if isinstance(c, C.AtLeast):
            f = self.extension(c.filler)
            return [x for x in dom if len(self.successors(c.role, x) & f) >= c.n]
        if isinstance(c, C.AtMost):
            f = self.extension(c.filler)
            return [x for x in dom if len(self.successors(c.role, x) & f) <= c.n]
        if isinstance(c, C.AttrCmp):
            values = self.attributes.get(c.attr, {})
            return [x for x, v in values.items() if c.holds(v)]
        if isinstance(c, C.HasAttr):
            return list(self.attributes.get(c.attr, {}))
        raise TypeError(f"cannot evaluate {c!r}")

    def holds(self, c: C.Concept, x: int) -> bool:
        return x in self.extension(c)

    def to_text(self) -> str:
        lines = [f"domain: 0..{self.size - 1}"]
        for name in sorted(self.individuals):
            lines.append(f"  {name} -> {self.individuals[name]}")
        for name in sorted(self.concepts):
            lines.append(f"  {name}: {sorted(self.concepts[name])}")
        for name in sorted(self.roles):
            lines.append(f"  {name}: {sorted(self.roles[name])}")
        for name in sorted(self.attributes):
            vals = ", ".join(f"{x}={C.format_number(v)}" for x, v in sorted(self.attributes[name].items()))
            lines.append(f"  {name}: {{{vals}}}")
        return "\n".join(lines)


def close_transitive(pairs: set[tuple[int, int]]) -> set[tuple[int, int]]:
    closed = set(pairs)
    succ: dict[int, set[int]] = {}
    for a, b in closed:
        succ.setdefault(a, set()).add(b)
    for start in list(succ):
        seen: set[int] = set()
        stack = list(succ[start])
        while stack:
            y = stack.pop()
            if y in seen:
                continue
            seen.add(y)
            stack.extend(succ.get(y, ()))
        closed.update((start, y) for y in seen)
    return closed


def tbox_violations(interp: Interpretation, kb: KnowledgeBase, axioms: Optional[Iterable] = None) -> list[str]:
    """Human-readable reasons why ``interp`` is not a model of the TBox."""
    out: list[str] = []
    for ax in kb.axioms if axioms is None else axioms:
        if isinstance(ax, GCI):
            bad = interp.extension(ax.lhs) - interp.extension(ax.rhs)
            if bad:
                out.append(f"{ax} fails at {sorted(bad)}")
        elif isinstance(ax, Equiv):
            if interp.extension(ax.lhs) != interp.extension(ax.rhs):
                out.append(f"{ax} fails")
        elif isinstance(ax, Disjoint):
            members = list(ax.members)
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    both = interp.extension(a) & interp.extension(b)
                    if both:
                        out.append(f"{ax} fails at {sorted(both)}")
    for name, decl in kb.roles.items():
        pairs = interp.roles.get(name, set())
        if decl.transitive and close_transitive(pairs) != pairs:
            out.append(f"role {name} is not transitive")
        if decl.domain is not None:
            dom = interp.extension(decl.domain)
            if any(a not in dom for a, _ in pairs):
                out.append(f"domain of {name} violated")
        if decl.range is not None:
            rng = interp.extension(decl.range)
            if any(b not in rng for _, b in pairs):
                out.append(f"range of {name} violated")
    for name, decl in kb.attributes.items():
        values = interp.attributes.get(name, {})
        if decl.domain is not None:
            dom = interp.extension(decl.domain)
            if any(x not in dom for x in values):
                out.append(f"domain of attribute {name} violated")
        if decl.value_type == "integer" and any(v != int(v) for v in values.values()):
            out.append(f"attribute {name} has a non-integer value")
    return out


def abox_violations(interp: Interpretation, assertions: Iterable) -> list[str]:
    out: list[str] = []
    elems = interp.individuals
    if len(set(elems.values())) != len(elems):
        out.append("unique-name assumption violated")
    for a in assertions:
        if isinstance(a, InstanceOf):
            x = elems.get(a.individual)
            if x is None or not interp.holds(a.concept, x):
                out.append(f"{a} fails")
        elif isinstance(a, Related):
            x, y = elems.get(a.subject), elems.get(a.object)
            if x is None or y is None or (x, y) not in interp.roles.get(a.role, set()):
                out.append(f"{a} fails")
        elif isinstance(a, AttrFiller):
            x = elems.get(a.individual)
            if x is None or interp.attributes.get(a.attribute, {}).get(x) != a.value:
                out.append(f"{a} fails")
    return out


def is_model(interp: Interpretation, kb: KnowledgeBase, axioms=None, assertions=None) -> bool:
    if tbox_violations(interp, kb, axioms):
        return False
    return not abox_violations(interp, assertions or ())
