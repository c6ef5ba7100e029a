"""The wind-energy ontology as KRSS files.

Two variants share every file except the location partition and the turbine
decomposition. ``intended`` is coherent; ``literal`` keeps those two listings
as written and is expected to be incoherent and to have rejected axioms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from ..loader import Loaded, load_text
from ..model.kb import KnowledgeBase

VARIANTS = ("intended", "literal")

_SHARED_HEAD = ("core-tbox",)
_SHARED_TAIL = (
    "potential-tbox",
    "geo-tbox",
    "sensor-tbox",
    "bayes-pattern",
    "dobrogea-abox",
    "rules",
    "queries",
)

MANIFEST: dict[str, tuple[str, ...]] = {
    v: _SHARED_HEAD + (f"location-{v}", "turbine-tbox", f"parts-{v}") + _SHARED_TAIL for v in VARIANTS
}

# listing id -> number of items (forms, or numbered lines for query listings)
LISTINGS: dict[str, int] = {
    "sensor-taxonomy": 2,
    "part-role": 1,
    "turbine-parts": 1,
    "nacelle-parts": 3,
    "component-prices": 4,
    "small-turbine": 1,
    "good-resource": 2,
    "wind-classes": 1,
    "wind-power": 1,
    "potential-at-50": 3,
    "marginal-union": 1,
    "access-roads": 2,
    "efficiency": 1,
    "extraction": 4,
    "locations": 9,
    "proper-turbine-rule": 1,
    "distance-pattern": 2,
    "wind-rose": 4,
    "conditional-probability": 9,
    "setback-scenario": 8,
    "queries": 5,
}

# items present only in rewritten form, with the rewrite
EXCLUSIONS: dict[str, str] = {
    "wind-power#1": "GCI with an arithmetic filler, stored as a rule in rules.krss",
    "turbine-parts#1": "number restrictions over the transitive hasPart, moved to hasDirectPart (intended variant)",
    "nacelle-parts#1": "number restrictions over the transitive hasPart, moved to hasDirectPart (intended variant)",
}

_ORIGIN = re.compile(r";\s*origin:\s*(\S+)")
_EXPECT = re.compile(r";\s*expect:\s*(.+)")


@dataclass(frozen=True)
class Block:
    """A run of non-blank lines: comments followed by one or more forms."""

    file: str
    line: int
    origin: Optional[str]
    expect: Optional[str]
    text: str

    @property
    def has_forms(self) -> bool:
        return any(ln.strip() and not ln.lstrip().startswith(";") for ln in self.text.splitlines())


def read(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.krss").read_text(encoding="utf-8")


def blocks(name: str) -> list[Block]:
    out: list[Block] = []
    cur: list[str] = []
    start = 0
    for i, ln in enumerate(read(name).splitlines() + [""], start=1):
        if ln.strip():
            if not cur:
                start = i
            cur.append(ln)
            continue
        if cur:
            text = "\n".join(cur)
            origin = _ORIGIN.search(text)
            expect = _EXPECT.search(text)
            out.append(
                Block(
                    name,
                    start,
                    origin.group(1) if origin else None,
                    expect.group(1).strip() if expect else None,
                    text,
                )
            )
            cur = []
    return out


def provenance(variant: str = "intended") -> dict[str, list[str]]:
    """Origin tag -> files it appears in, over the variant's manifest."""
    out: dict[str, list[str]] = {}
    for name in MANIFEST[variant]:
        for b in blocks(name):
            if b.origin is not None:
                out.setdefault(b.origin, []).append(name)
    return out


def untagged_blocks(variant: str = "intended") -> list[Block]:
    return [b for name in MANIFEST[variant] for b in blocks(name) if b.has_forms and b.origin is None]


def listing_items() -> list[str]:
    return [f"{k}#{i}" for k, n in LISTINGS.items() for i in range(1, n + 1)]


def missing_listing_items(variant: str = "intended") -> list[str]:
    seen = provenance(variant)
    return [item for item in listing_items() if item not in seen and item not in EXCLUSIONS]


def duplicated_listing_items(variant: str = "intended") -> list[str]:
    return sorted(k for k, files in provenance(variant).items() if not k.startswith("authored") and len(files) > 1)


def load_corpus(variant: str = "intended", kb: Optional[KnowledgeBase] = None) -> Loaded:
    """Load every manifest file in order; diagnostics are returned, not raised."""
    if variant not in MANIFEST:
        raise ValueError(f"unknown corpus variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    out = Loaded(kb if kb is not None else KnowledgeBase())
    for name in MANIFEST[variant]:
        load_text(read(name), f"{name}.krss", into=out)
    return out


def expected_answer(cq: str) -> list[str]:
    text = resources.files(__name__).joinpath("expected", f"{cq.lower()}.txt").read_text(encoding="utf-8")
    return [ln for ln in text.splitlines() if ln.strip()]


__all__ = [
    "EXCLUSIONS",
    "LISTINGS",
    "MANIFEST",
    "VARIANTS",
    "Block",
    "blocks",
    "duplicated_listing_items",
    "expected_answer",
    "listing_items",
    "load_corpus",
    "missing_listing_items",
    "provenance",
    "read",
    "untagged_blocks",
]
