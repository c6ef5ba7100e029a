"""Finite-model oracle: decide questions by searching interpretations.

Interpretations over domains {0..n-1} are encoded propositionally, one
variable per concept-name membership, role pair and attribute value, and
handed to a SAT solver.  Concept semantics are encoded constructor by
constructor straight from their set-theoretic definitions; nothing is shared
with the tableau.  Every model the solver returns is decoded and re-checked
with the direct evaluator in ``semantics``.

Attribute values range over a finite pool that contains a representative of
every region the KB's comparison constants cut the number line into, so the
restriction loses no models.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from pysat.formula import IDPool
from pysat.solvers import Solver

from ..errors import SizeLimitExceeded, WindKBError
from ..model import concepts as C
from ..model.kb import (
    GCI,
    INTEGER,
    AttrFiller,
    Disjoint,
    Equiv,
    InstanceOf,
    KnowledgeBase,
    Related,
)
from .semantics import Interpretation, abox_violations, tbox_violations

MAX_CLAUSES = 3_000_000
UNDEF = "undef"


def value_pool(constants: Iterable[C.Number], integer: bool) -> list[C.Number]:
    ks = sorted(set(constants))
    if not ks:
        return [0]
    if integer:
        out: set[int] = set()
        for k in ks:
            out.update((math.floor(k) - 1, math.floor(k), math.ceil(k), math.ceil(k) + 1))
        return sorted(out)
    out_r: set[C.Number] = set(ks)
    out_r.add(ks[0] - 1)
    out_r.add(ks[-1] + 1)
    for a, b in zip(ks, ks[1:]):
        out_r.add((a + b) / 2)
    return sorted(out_r)


@dataclass
class OracleResult:
    satisfiable: bool
    domain_size: Optional[int] = None
    model: Optional[Interpretation] = None

    def __bool__(self) -> bool:
        return self.satisfiable


class _Grounding:
    def __init__(self, n: int, kb: KnowledgeBase, pools: dict[str, list], max_clauses: int):
        self.n = n
        self.kb = kb
        self.pools = pools
        self.ids = IDPool()
        self.clauses: list[list[int]] = []
        self.memo: dict[tuple[C.Concept, int], int] = {}
        self.max_clauses = max_clauses
        self.true = self.ids.id(("true",))
        self.clauses.append([self.true])
        for a, pool in pools.items():
            for e in range(n):
                lits = [self.val(a, e, UNDEF)] + [self.val(a, e, i) for i in range(len(pool))]
                self.add(lits)
                for x, y in itertools.combinations(lits, 2):
                    self.add([-x, -y])

    def add(self, clause: list[int]) -> None:
        self.clauses.append(clause)
        if len(self.clauses) > self.max_clauses:
            raise SizeLimitExceeded(f"grounding over {self.n} elements exceeds {self.max_clauses} clauses")

    def name(self, a: str, e: int) -> int:
        return self.ids.id(("C", a, e))

    def role(self, r: str, e: int, f: int) -> int:
        return self.ids.id(("R", r, e, f))

    def val(self, a: str, e: int, i) -> int:
        return self.ids.id(("V", a, e, i))

    def _fresh(self) -> int:
        return self.ids.id(("aux", len(self.ids.obj2id)))

    def _and(self, lits: list[int]) -> int:
        if not lits:
            return self.true
        if len(lits) == 1:
            return lits[0]
        t = self._fresh()
        for x in lits:
            self.add([-t, x])
        self.add([t] + [-x for x in lits])
        return t

    def _or(self, lits: list[int]) -> int:
        if not lits:
            return -self.true
        if len(lits) == 1:
            return lits[0]
        t = self._fresh()
        for x in lits:
            self.add([t, -x])
        self.add([-t] + lits)
        return t

    def lit(self, c: C.Concept, e: int) -> int:
        key = (c, e)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._encode(c, e)
            self.memo[key] = hit
        return hit

    def _encode(self, c: C.Concept, e: int) -> int:
        n = self.n
        if isinstance(c, C.Top):
            return self.true
        if isinstance(c, C.Bottom):
            return -self.true
        if isinstance(c, C.Name):
            return self.name(c.name, e)
        if isinstance(c, C.Not):
            return -self.lit(c.arg, e)
        if isinstance(c, C.And):
            return self._and([self.lit(a, e) for a in c.args])
        if isinstance(c, C.Or):
            return self._or([self.lit(a, e) for a in c.args])
        if isinstance(c, C.Some):
            return self._or([self._and([self.role(c.role, e, f), self.lit(c.filler, f)]) for f in range(n)])
        if isinstance(c, C.All):
            # every r-successor is in the filler: no successor outside it
            return -self._or(
                [self._and([self.role(c.role, e, f), -self.lit(c.filler, f)]) for f in range(n)]
            )
        if isinstance(c, C.AtLeast):
            if c.n == 0:
                return self.true
            ys = [self._and([self.role(c.role, e, f), self.lit(c.filler, f)]) for f in range(n)]
            return self._or([self._and(list(s)) for s in itertools.combinations(ys, c.n)])
        if isinstance(c, C.AtMost):
            return -self.lit(C.AtLeast(c.n + 1, c.role, c.filler), e)
        if isinstance(c, C.AttrCmp):
            pool = self.pools[c.attr]
            return self._or([self.val(c.attr, e, i) for i, v in enumerate(pool) if c.holds(v)])
        if isinstance(c, C.HasAttr):
            return -self.val(c.attr, e, UNDEF)
        raise TypeError(f"cannot encode {c!r}")

    def require_everywhere(self, c: C.Concept) -> None:
        for e in range(self.n):
            self.add([self.lit(c, e)])

    def encode_tbox(self, axioms: Iterable) -> None:
        for ax in axioms:
            if isinstance(ax, GCI):
                for e in range(self.n):
                    self.add([-self.lit(ax.lhs, e), self.lit(ax.rhs, e)])
            elif isinstance(ax, Equiv):
                for e in range(self.n):
                    a, b = self.lit(ax.lhs, e), self.lit(ax.rhs, e)
                    self.add([-a, b])
                    self.add([a, -b])
            elif isinstance(ax, Disjoint):
                for x, y in itertools.combinations(ax.members, 2):
                    for e in range(self.n):
                        self.add([-self.lit(x, e), -self.lit(y, e)])
        rng = range(self.n)
        for name, decl in self.kb.roles.items():
            if decl.transitive:
                for e, f, g in itertools.product(rng, rng, rng):
                    self.add([-self.role(name, e, f), -self.role(name, f, g), self.role(name, e, g)])
            if decl.domain is not None:
                for e, f in itertools.product(rng, rng):
                    self.add([-self.role(name, e, f), self.lit(decl.domain, e)])
            if decl.range is not None:
                for e, f in itertools.product(rng, rng):
                    self.add([-self.role(name, e, f), self.lit(decl.range, f)])
        for name, decl in self.kb.attributes.items():
            if decl.domain is not None and name in self.pools:
                for e in rng:
                    self.add([self.val(name, e, UNDEF), self.lit(decl.domain, e)])

    def encode_abox(self, assertions: Sequence, individuals: dict[str, int]) -> None:
        for a in assertions:
            if isinstance(a, InstanceOf):
                self.add([self.lit(a.concept, individuals[a.individual])])
            elif isinstance(a, Related):
                self.add([self.role(a.role, individuals[a.subject], individuals[a.object])])
            elif isinstance(a, AttrFiller):
                pool = self.pools[a.attribute]
                self.add([self.val(a.attribute, individuals[a.individual], pool.index(a.value))])

    def decode(self, model: Iterable[int], individuals: dict[str, int]) -> Interpretation:
        true = {x for x in model if x > 0}
        interp = Interpretation(self.n, individuals=dict(individuals))
        for key, vid in self.ids.obj2id.items():
            if vid not in true:
                continue
            tag = key[0]
            if tag == "C":
                interp.concepts.setdefault(key[1], set()).add(key[2])
            elif tag == "R":
                interp.roles.setdefault(key[1], set()).add((key[2], key[3]))
            elif tag == "V" and key[3] != UNDEF:
                interp.attributes.setdefault(key[1], {})[key[2]] = self.pools[key[1]][key[3]]
        return interp


def _pools(kb: KnowledgeBase, concepts: Iterable[C.Concept], axioms, assertions) -> dict[str, list]:
    consts: dict[str, set] = {}
    used: set[str] = set()
    todo = list(concepts)
    for ax in axioms:
        todo.extend(ax.concepts())
    for d in kb.roles.values():
        todo.extend(x for x in (d.domain, d.range) if x is not None)
    for d in kb.attributes.values():
        if d.domain is not None:
            todo.append(d.domain)
    for a in assertions:
        if isinstance(a, InstanceOf):
            todo.append(a.concept)
        elif isinstance(a, AttrFiller):
            used.add(a.attribute)
            consts.setdefault(a.attribute, set()).add(a.value)
    for c in todo:
        for x in C.walk(c):
            if isinstance(x, C.AttrCmp):
                consts.setdefault(x.attr, set()).add(x.value)
                used.add(x.attr)
            elif isinstance(x, C.HasAttr):
                used.add(x.attr)
    return {a: value_pool(consts.get(a, ()), kb.attribute_type(a) == INTEGER) for a in sorted(used)}


def _solve(g: _Grounding) -> Optional[list[int]]:
    with Solver(name="minisat22", bootstrap_with=g.clauses) as s:
        if s.solve():
            return s.get_model()
    return None


def oracle_satisfiable(
    kb: KnowledgeBase,
    c: C.Concept,
    max_domain: int = 4,
    axioms: Optional[Sequence] = None,
    max_clauses: int = MAX_CLAUSES,
) -> OracleResult:
    """Is there a model of the TBox with at most ``max_domain`` elements in
    which ``c`` is non-empty?  Sizes are tried in increasing order."""
    axioms = list(kb.axioms if axioms is None else axioms)
    pools = _pools(kb, [c], axioms, ())
    for n in range(1, max_domain + 1):
        g = _Grounding(n, kb, pools, max_clauses)
        g.encode_tbox(axioms)
        g.add([g.lit(c, e) for e in range(n)])
        model = _solve(g)
        if model is not None:
            interp = g.decode(model, {})
            _verify(interp, kb, axioms, ())
            if not interp.extension(c):
                raise WindKBError("oracle produced a model with an empty target concept")
            return OracleResult(True, n, interp)
    return OracleResult(False)


def oracle_consistent(
    kb: KnowledgeBase,
    max_domain: int = 4,
    assertions: Optional[Sequence] = None,
    axioms: Optional[Sequence] = None,
    max_clauses: int = MAX_CLAUSES,
) -> OracleResult:
    """Finite-model check of TBox plus ABox under the unique-name assumption."""
    axioms = list(kb.axioms if axioms is None else axioms)
    assertions = list(kb.abox if assertions is None else assertions)
    names: list[str] = []
    for a in assertions:
        for ind in ((a.subject, a.object) if isinstance(a, Related) else (a.individual,)):
            if ind not in names:
                names.append(ind)
    names.sort()
    individuals = {name: i for i, name in enumerate(names)}
    pools = _pools(kb, [], axioms, assertions)
    for n in range(max(1, len(names)), max(max_domain, len(names)) + 1):
        g = _Grounding(n, kb, pools, max_clauses)
        g.encode_tbox(axioms)
        g.encode_abox(assertions, individuals)
        model = _solve(g)
        if model is not None:
            interp = g.decode(model, individuals)
            _verify(interp, kb, axioms, assertions)
            return OracleResult(True, n, interp)
    return OracleResult(False)


def _verify(interp: Interpretation, kb, axioms, assertions) -> None:
    problems = tbox_violations(interp, kb, axioms) + abox_violations(interp, assertions)
    if problems:
        raise WindKBError("oracle model failed direct evaluation: " + "; ".join(problems[:3]))


def enumerate_satisfiable(kb: KnowledgeBase, c: C.Concept, max_domain: int = 2, axioms=None) -> bool:
    """Plain enumeration of every interpretation; only for tiny signatures.

    Serves as a check on the propositional grounding itself.
    """
    axioms = list(kb.axioms if axioms is None else axioms)
    everything = [c] + [x for ax in axioms for x in ax.concepts()]
    names = sorted(set().union(*(C.concept_names(x) for x in everything)))
    roles = sorted(set(kb.roles) | set().union(*(C.roles_used(x) for x in everything)))
    pools = _pools(kb, [c], axioms, ())
    for n in range(1, max_domain + 1):
        dom = range(n)
        pairs = list(itertools.product(dom, dom))
        name_sets = list(itertools.product([False, True], repeat=n))
        role_sets = list(itertools.product([False, True], repeat=len(pairs)))
        attr_slots = [(a, e) for a in pools for e in dom]
        attr_space = list(itertools.product(*[[None] + list(range(len(pools[a]))) for a, _ in attr_slots]))
        for name_bits in itertools.product(name_sets, repeat=len(names)):
            for role_bits in itertools.product(role_sets, repeat=len(roles)):
                for attr_bits in attr_space:
                    interp = Interpretation(n)
                    for a, bits in zip(names, name_bits):
                        interp.concepts[a] = {e for e in dom if bits[e]}
                    for r, bits in zip(roles, role_bits):
                        interp.roles[r] = {p for p, b in zip(pairs, bits) if b}
                    for (a, e), i in zip(attr_slots, attr_bits):
                        if i is not None:
                            interp.attributes.setdefault(a, {})[e] = pools[a][i]
                    if interp.extension(c) and not tbox_violations(interp, kb, axioms):
                        return True
    return False
