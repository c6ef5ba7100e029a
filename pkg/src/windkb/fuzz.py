"""Random differential testing of the tableau against the finite-model oracle."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .model import concepts as C
from .model.kb import INTEGER, REAL, AttributeDecl, Disjoint, Equiv, GCI, InstanceOf, KnowledgeBase, Related, AttrFiller, RoleDecl
from .reasoner.oracle import oracle_consistent, oracle_satisfiable
from .reasoner.semantics import abox_violations, tbox_violations
from .reasoner.tableau import Reasoner

DEFAULT_WEIGHTS = {
    "name": 4,
    "not": 2,
    "and": 2,
    "or": 2,
    "some": 2,
    "all": 2,
    "at-least": 1,
    "at-most": 1,
    "compare": 1,
}
BOOLEAN_WEIGHTS = {"name": 4, "not": 2, "and": 2, "or": 2}
# quantifier-heavy mix over a transitive role; this is what exposes
# mistakes in the propagation of universals along transitive chains
TRANSITIVE_WEIGHTS = {"name": 3, "not": 2, "and": 2, "or": 1, "some": 3, "all": 3}


@dataclass(frozen=True)
class GenSpec:
    names: tuple[str, ...] = ("A", "B", "C")
    roles: tuple[str, ...] = ("r", "s")
    transitive: tuple[str, ...] = ("s",)
    transitive_prob: float = 0.6
    max_depth: int = 2
    max_card: int = 2
    max_axioms: int = 2
    max_domain: int = 4
    escalate_domain: int = 8
    weights: tuple[tuple[str, float], ...] = tuple(DEFAULT_WEIGHTS.items())
    attribute: Optional[str] = "a"
    attribute_type: str = REAL
    constants: tuple = (1, 2.5)
    abox_prob: float = 0.0
    seed: int = 42

    @classmethod
    def boolean(cls, **kw) -> "GenSpec":
        return cls(weights=tuple(BOOLEAN_WEIGHTS.items()), attribute=None, roles=(), transitive=(), **kw)

    @classmethod
    def transitive_heavy(cls, **kw) -> "GenSpec":
        kw.setdefault("max_depth", 3)
        return cls(
            names=("A", "B"),
            weights=tuple(TRANSITIVE_WEIGHTS.items()),
            attribute=None,
            transitive_prob=1.0,
            **kw,
        )

    @classmethod
    def profile(cls, name: str, **kw) -> "GenSpec":
        return PROFILES[name](**kw)


PROFILES: dict[str, Callable[..., GenSpec]] = {
    "default": lambda **kw: GenSpec(**{"max_axioms": 4, "max_depth": 3, "abox_prob": 0.3, **kw}),
    "boolean": GenSpec.boolean,
    "transitive": GenSpec.transitive_heavy,
    "integer": lambda **kw: GenSpec(**{"attribute_type": INTEGER, "max_axioms": 3, **kw}),
}


@dataclass
class Case:
    index: int
    kb: KnowledgeBase
    concept: Optional[C.Concept]
    assertions: tuple = ()

    @property
    def is_abox(self) -> bool:
        return self.concept is None

    def to_krss(self) -> str:
        lines = [f"; fuzz case {self.index}"]
        for decl in sorted(self.kb.roles.values(), key=lambda d: d.name):
            lines.append(str(decl))
        for decl in sorted(self.kb.attributes.values(), key=lambda d: d.name):
            lines.append(str(decl))
        lines.extend(str(ax) for ax in self.kb.axioms)
        lines.extend(str(a) for a in self.assertions)
        if self.concept is not None:
            lines.append(f"(concept-satisfiable? {self.concept})")
        else:
            lines.append("(abox-consistent?)")
        return "\n".join(lines) + "\n"


@dataclass
class Verdict:
    tableau: bool
    oracle: bool
    oracle_domain: Optional[int]
    witness_ok: bool = True
    note: str = ""

    @property
    def agrees(self) -> bool:
        return self.tableau == self.oracle and self.witness_ok


@dataclass
class Disagreement:
    case: Case
    verdict: Verdict
    repro: str


@dataclass
class FuzzReport:
    cases: int = 0
    agreements: int = 0
    disagreements: list[Disagreement] = field(default_factory=list)
    sat_cases: int = 0
    escalated: int = 0
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def summary(self) -> str:
        return (
            f"{self.cases} cases, {self.agreements} agreements, "
            f"{len(self.disagreements)} disagreements ({self.sat_cases} satisfiable, "
            f"{self.escalated} needed a larger oracle domain)"
        )


class _Gen:
    def __init__(self, spec: GenSpec, rng: random.Random, transitive: frozenset):
        self.spec = spec
        self.rng = rng
        self.transitive = transitive
        self.weights = dict(spec.weights)
        if spec.attribute is None:
            self.weights.pop("compare", None)
        if not spec.roles:
            for k in ("some", "all", "at-least", "at-most"):
                self.weights.pop(k, None)

    def pick(self, depth: int) -> str:
        kinds = [k for k in self.weights if self.weights[k] > 0]
        if depth <= 0:
            kinds = [k for k in kinds if k in ("name", "not", "compare")]
        simple = [r for r in self.spec.roles if r not in self.transitive]
        if not simple:
            kinds = [k for k in kinds if k not in ("at-least", "at-most")]
        return self.rng.choices(kinds, [self.weights[k] for k in kinds])[0]

    def name(self) -> C.Concept:
        return C.Name(self.rng.choice(self.spec.names))

    def concept(self, depth: int) -> C.Concept:
        rng = self.rng
        kind = self.pick(depth)
        if kind == "name":
            return self.name()
        if kind == "not":
            return C.Not(self.name() if depth <= 0 else self.concept(depth - 1))
        if kind == "compare":
            return C.AttrCmp(self.spec.attribute, rng.choice(C.COMPARISON_OPS), rng.choice(self.spec.constants))
        if kind in ("and", "or"):
            args = tuple(self.concept(depth - 1) for _ in range(rng.choice((2, 2, 3))))
            return C.And(args) if kind == "and" else C.Or(args)
        role = rng.choice(self.spec.roles)
        if kind in ("some", "all"):
            f = self.concept(depth - 1)
            return C.Some(role, f) if kind == "some" else C.All(role, f)
        simple = [r for r in self.spec.roles if r not in self.transitive]
        role = rng.choice(simple)
        n = rng.randint(0 if kind == "at-most" else 1, self.spec.max_card)
        filler = C.TOP if rng.random() < 0.3 else self.concept(depth - 1)
        return C.AtLeast(n, role, filler) if kind == "at-least" else C.AtMost(n, role, filler)

    def axiom(self):
        d = self.spec.max_depth
        roll = self.rng.random()
        if roll < 0.55:
            lhs = self.name() if self.rng.random() < 0.6 else self.concept(d - 1)
            return GCI(lhs, self.concept(d - 1))
        if roll < 0.85:
            return Equiv(self.name(), self.concept(d - 1))
        a, b = self.rng.sample(self.spec.names, 2)
        return Disjoint((C.Name(a), C.Name(b)))


def generate_case(spec: GenSpec, index: int) -> Case:
    rng = random.Random(spec.seed * 1_000_003 + index)
    transitive = frozenset(r for r in spec.transitive if r in spec.roles and rng.random() < spec.transitive_prob)
    kb = KnowledgeBase()
    for r in spec.roles:
        kb.add(RoleDecl(r, transitive=r in transitive))
    if spec.attribute is not None:
        kb.add(AttributeDecl(spec.attribute, None, spec.attribute_type))
    gen = _Gen(spec, rng, transitive)
    for _ in range(rng.randint(0, spec.max_axioms)):
        kb.add(gen.axiom())
    if spec.abox_prob and rng.random() < spec.abox_prob:
        inds = ["i", "j"]
        assertions = []
        for _ in range(rng.randint(1, 3)):
            roll = rng.random()
            if roll < 0.6 or not spec.roles:
                assertions.append(InstanceOf(rng.choice(inds), gen.concept(spec.max_depth - 1)))
            elif roll < 0.85 or spec.attribute is None:
                assertions.append(Related(rng.choice(inds), rng.choice(inds), rng.choice(spec.roles)))
            else:
                assertions.append(AttrFiller(rng.choice(inds), rng.choice(spec.constants), spec.attribute))
        kb.add_all(assertions)
        return Case(index, kb, None, tuple(assertions))
    return Case(index, kb, gen.concept(spec.max_depth))


def judge(case: Case, spec: GenSpec, faults: Sequence[str] = ()) -> Verdict:
    reasoner = Reasoner(case.kb, faults=faults)
    if case.is_abox:
        res = reasoner.abox_consistent()
        tab = res.consistent
        witness_ok = True
        if tab and res.witness is not None:
            witness_ok = not (tbox_violations(res.witness, case.kb) or abox_violations(res.witness, case.kb.abox))

        def ask(n):
            return oracle_consistent(case.kb, max_domain=n)
    else:
        tab, model = reasoner.satisfiable_with_witness(case.concept)
        witness_ok = True
        if tab:
            witness_ok = bool(model.extension(case.concept)) and not tbox_violations(model, case.kb)

        def ask(n):
            return oracle_satisfiable(case.kb, case.concept, max_domain=n)

    res = ask(spec.max_domain)
    note = ""
    if tab and not res.satisfiable and spec.escalate_domain > spec.max_domain:
        res = ask(spec.escalate_domain)
        note = "escalated"
    v = Verdict(tab, res.satisfiable, res.domain_size, witness_ok, note)
    return v


def shrink(case: Case, spec: GenSpec, still_bad: Callable[[Case], bool]) -> Case:
    """Delta debugging over the axiom list: drop axioms while the
    disagreement persists."""
    axioms = list(case.kb.axioms)
    changed = True
    while changed and axioms:
        changed = False
        for i in range(len(axioms)):
            trial = axioms[:i] + axioms[i + 1:]
            candidate = _with_axioms(case, trial)
            if still_bad(candidate):
                axioms = trial
                case = candidate
                changed = True
                break
    return case


def _with_axioms(case: Case, axioms) -> Case:
    kb = KnowledgeBase()
    for d in case.kb.roles.values():
        kb.add(d)
    for d in case.kb.attributes.values():
        kb.add(d)
    kb.add_all(axioms)
    kb.add_all(case.assertions)
    return Case(case.index, kb, case.concept, case.assertions)


def fuzz_satisfiability(
    spec: GenSpec,
    n_cases: int,
    faults: Sequence[str] = (),
    stop_after: Optional[int] = None,
    progress: Optional[Callable[[int, Verdict], None]] = None,
) -> FuzzReport:
    report = FuzzReport()
    start = time.perf_counter()
    for i in range(n_cases):
        case = generate_case(spec, i)
        verdict = judge(case, spec, faults)
        report.cases += 1
        if verdict.note:
            report.escalated += 1
        if verdict.oracle:
            report.sat_cases += 1
        if verdict.agrees:
            report.agreements += 1
        else:
            small = shrink(case, spec, lambda c: not judge(c, spec, faults).agrees)
            report.disagreements.append(Disagreement(small, judge(small, spec, faults), small.to_krss()))
            if stop_after is not None and len(report.disagreements) >= stop_after:
                break
        if progress is not None:
            progress(i, verdict)
    report.elapsed = time.perf_counter() - start
    return report
