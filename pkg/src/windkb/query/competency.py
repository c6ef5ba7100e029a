"""The competency questions of the wind-turbine domain as executable queries.

Each question is answered with sorted lines of space-separated tokens, the
same format as the files under ``corpus/expected``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..errors import UnresolvedLocation
from ..geo import Locator, check_compliance, emit_distance_facts
from ..krss.forms import parse_form
from ..model.concepts import Name
from ..model.kb import KnowledgeBase
from .engine import QueryEngine, render_value

QUESTIONS = {
    "CQ1": "wind potential class at 50 m per location",
    "CQ2": "residential setback verdict per located turbine",
    "CQ3": "wind rose entries per location",
    "CQ4": "vegetation near each turbine",
    "CQ5": "turbine types near each turbine",
    "CQ6": "generator alarms raised after a maintenance of the same turbine",
}

# weakest first; CQ1 reports the strongest one a location belongs to
POTENTIALS_AT_50 = ("MarginalPotentialat50", "PromisingPotentialat50", "ExcellentPotentialat50")

WIND_ROSE = parse_form(
    "(retrieve (?l ?w ?d ?f) (and (?l ?w hasWindRose) (?w ?d hasDirection) (?w ?f hasFrequency)))"
).payload
VEGETATION_NEAR = (
    "(retrieve (?t ?v ?m) (and (?t WindTurbine) (?v Vegetation) (?d DistanceBetween2Objects)"
    " (?d ?t hasObject) (?d ?v hasObject) (?d ?m hasDistance) (< ?m {radius})))"
)
TURBINES_NEAR = (
    "(retrieve (?t ?u ?m) (and (?t WindTurbine) (?u WindTurbine) (?d DistanceBetween2Objects)"
    " (?d ?t hasObject) (?d ?u hasObject) (?d ?m hasDistance) (< ?m {radius})))"
)
ALARM_AFTER_MAINTENANCE = parse_form(
    "(retrieve (?wt ?al) (and (?m ?wt maintains) (?m ?t1 hasTime) (?wt ?g hasPart) (?g Generator)"
    " (?al ?g concernsComponent) (?al ?t2 hasTime) (> ?t2 ?t1)))"
).payload


@dataclass
class CompetencyReport:
    answers: dict[str, list[str]] = field(default_factory=dict)
    notes: dict[str, list[str]] = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = []
        for cq in sorted(self.answers):
            out.append(f"{cq}: {QUESTIONS[cq]}")
            out.extend(f"  {ln}" for ln in self.answers[cq]) if self.answers[cq] else out.append("  (none)")
            out.extend(f"  note: {n}" for n in self.notes.get(cq, ()))
        return out

    def as_dict(self) -> dict:
        return {cq: {"answer": self.answers[cq], "notes": self.notes.get(cq, [])} for cq in sorted(self.answers)}


def _located_turbines(engine: QueryEngine, locator: Locator) -> tuple[list[str], list[str]]:
    located, skipped = [], []
    for t in engine.concept_instances(Name("WindTurbine")):
        try:
            locator.resolve(t)
            located.append(t)
        except UnresolvedLocation:
            skipped.append(t)
    return located, skipped


def _with_distances(kb: KnowledgeBase, pairs: list[tuple[str, str]]) -> KnowledgeBase:
    out = kb.copy()
    out.add_all(emit_distance_facts(out, [(a, b, f"cqdist_{a}_{b}") for a, b in pairs]))
    return out


def run_competency_suite(
    kb: KnowledgeBase,
    threshold_m: float = 300.0,
    vegetation_radius_m: float = 200.0,
    nearby_radius_m: float = 1000.0,
    jobs: int = 1,
) -> CompetencyReport:
    report = CompetencyReport()
    base = QueryEngine(kb, jobs=jobs)
    locator = Locator(base.kb)
    turbines, unlocated = _located_turbines(base, locator)
    specific: Callable[[str], str] = lambda ind: " ".join(base.most_specific_types(ind)) or "Thing"

    cq1 = []
    best: dict[str, str] = {}
    for concept in POTENTIALS_AT_50:
        for loc in base.concept_instances(Name(concept)):
            best[loc] = concept
    cq1 = [f"{loc} {c}" for loc, c in sorted(best.items())]
    report.answers["CQ1"] = cq1

    cq2 = []
    for t in turbines:
        r = check_compliance(base.kb, t, threshold_m, reasoner=base.reasoner)
        site, _ = locator.resolve(t)
        measured = "-" if r.measured_m is None else f"{r.measured_m:.1f}"
        cq2.append(f"{t} {specific(t)} {site} {r.verdict} {measured}")
    report.answers["CQ2"] = sorted(cq2)
    if unlocated:
        report.notes["CQ2"] = [f"turbines without a location: {' '.join(unlocated)}"]

    report.answers["CQ3"] = [" ".join(row.values()) for row in base.retrieve(WIND_ROSE)]

    vegetation = []
    for v in base.concept_instances(Name("Vegetation")):
        try:
            locator.resolve(v)
            vegetation.append(v)
        except UnresolvedLocation:
            pass
    pairs = [(t, v) for t in turbines for v in vegetation if t != v]
    pairs += [(t, u) for t in turbines for u in turbines if t < u]
    measured = QueryEngine(_with_distances(base.kb, pairs), jobs=jobs) if pairs else base

    def rows(template: str, radius: float):
        q = parse_form(template.format(radius=render_value(radius))).payload
        return measured.retrieve(q)

    cq4 = []
    for row in rows(VEGETATION_NEAR, vegetation_radius_m):
        cq4.append(f"{row['?t']} {row['?v']} {specific(row['?v'])} {float(row['?m']):.1f}")
    report.answers["CQ4"] = sorted(cq4)

    cq5 = []
    for row in rows(TURBINES_NEAR, nearby_radius_m):
        if row["?t"] != row["?u"]:
            cq5.append(f"{row['?t']} {row['?u']} {specific(row['?u'])} {float(row['?m']):.1f}")
    report.answers["CQ5"] = sorted(cq5)

    report.answers["CQ6"] = [" ".join(row.values()) for row in base.retrieve(ALARM_AFTER_MAINTENANCE)]
    report.notes["CQ6"] = ["answered over the simplified alarm and maintenance facts"]
    report.notes["CQ1"] = ["interpretation: the strongest potential class at 50 m each location belongs to"]
    return report


def compare_with_expected(report: CompetencyReport, expected: Callable[[str], list[str]]) -> dict[str, Optional[str]]:
    """Per question, ``None`` when the answer matches, else a short diff."""
    out: dict[str, Optional[str]] = {}
    for cq, got in report.answers.items():
        want = expected(cq)
        if got == want:
            out[cq] = None
        else:
            missing = [w for w in want if w not in got]
            extra = [g for g in got if g not in want]
            out[cq] = f"missing {missing}, unexpected {extra}"
    return out
