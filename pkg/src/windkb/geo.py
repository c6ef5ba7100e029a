"""Great-circle distances, point-to-area distances and the setback check."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import DegenerateArea, InvalidGeometry, UnknownIndividual, UnresolvedLocation
from .model.concepts import Name
from .model.kb import INTEGER, AttrFiller, InstanceOf, KnowledgeBase, Related

EARTH_RADIUS_M = 6_371_008.8
EPS = 1e-9

LATITUDE = "hasLatitude"
LONGITUDE = "hasLongitude"
LOCATED = "isLocated"
CONTOUR = "hasContourPoint"
RESIDENTIAL = "geonames:ResidentialArea"
DISTANCE_CONCEPT = "DistanceBetween2Objects"
DISTANCE_RECORD = "Distance"
HAS_OBJECT = "hasObject"
HAS_DISTANCE = "hasDistance"
HAS_VALUE = "hasValue"


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self):
        for v in (self.latitude, self.longitude):
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise InvalidGeometry(f"coordinate {v!r} is not a finite number")
        if not -90 <= self.latitude <= 90:
            raise InvalidGeometry(f"latitude {self.latitude} outside [-90, 90]")
        if not -180 <= self.longitude <= 180:
            raise InvalidGeometry(f"longitude {self.longitude} outside [-180, 180]")


def _project(points: Iterable[GeoPoint], origin: GeoPoint) -> list[tuple[float, float]]:
    """Local equirectangular projection in meters, centered at ``origin``."""
    phi0 = math.radians(origin.latitude)
    k = math.cos(phi0)
    out = []
    for p in points:
        dlon = p.longitude - origin.longitude
        dlon = (dlon + 180.0) % 360.0 - 180.0
        x = EARTH_RADIUS_M * math.radians(dlon) * k
        y = EARTH_RADIUS_M * math.radians(p.latitude - origin.latitude)
        out.append((x, y))
    return out


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_cross(p1, p2, q1, q2) -> bool:
    d1, d2 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    d3, d4 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True

    def on(a, b, c, d):
        return d == 0 and min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return on(q1, q2, p1, d1) or on(q1, q2, p2, d2) or on(p1, p2, q1, d3) or on(p1, p2, q2, d4)


@dataclass(frozen=True)
class GeoArea:
    contour: tuple[GeoPoint, ...]

    def __post_init__(self):
        pts = tuple(self.contour)
        object.__setattr__(self, "contour", pts)
        if len(set(pts)) < 3:
            raise InvalidGeometry("an area needs at least three distinct contour points")
        xy = _project(pts, self.center)
        n = len(xy)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(xy[i], xy[(i + 1) % n], xy[j], xy[(j + 1) % n]):
                    raise InvalidGeometry("area contour intersects itself")

    @property
    def center(self) -> GeoPoint:
        lat = sum(p.latitude for p in self.contour) / len(self.contour)
        lon = sum(p.longitude for p in self.contour) / len(self.contour)
        return GeoPoint(lat, lon)


Location = Union[GeoPoint, GeoArea]


def haversine(p: GeoPoint, q: GeoPoint) -> float:
    phi1, phi2 = math.radians(p.latitude), math.radians(q.latitude)
    dphi = phi2 - phi1
    dlam = math.radians(q.longitude - p.longitude)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def _segment_distance(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    length2 = dx * dx + dy * dy
    if length2 == 0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / length2))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def _inside(p, poly) -> bool:
    x, y = p
    inside = False
    n = len(poly)
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def min_distance_point_area(p: GeoPoint, area: GeoArea) -> float:
    """0 inside or on the contour, else distance to the nearest edge."""
    poly = _project(area.contour, p)
    twice_area = sum(
        poly[i][0] * poly[(i + 1) % len(poly)][1] - poly[(i + 1) % len(poly)][0] * poly[i][1]
        for i in range(len(poly))
    )
    if abs(twice_area) < EPS:
        raise DegenerateArea("area contour collapses to a line in projection")
    origin = (0.0, 0.0)
    edge = min(_segment_distance(origin, poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly)))
    if edge <= EPS or _inside(origin, poly):
        return 0.0
    return edge


def distance(a: Location, b: Location) -> float:
    if isinstance(a, GeoPoint) and isinstance(b, GeoPoint):
        return haversine(a, b)
    if isinstance(a, GeoPoint):
        return min_distance_point_area(a, b)
    if isinstance(b, GeoPoint):
        return min_distance_point_area(b, a)
    # area to area: nearest vertex of either contour to the other area
    return min(
        min(min_distance_point_area(p, b) for p in a.contour),
        min(min_distance_point_area(p, a) for p in b.contour),
    )


# ---------------------------------------------------------------- KB side


def _coordinates(kb: KnowledgeBase) -> dict[str, dict[str, float]]:
    from .query.rules import told_values

    out: dict[str, dict[str, float]] = {}
    for (ind, attr), vals in told_values(kb).items():
        if attr in (LATITUDE, LONGITUDE) and vals:
            if len(vals) > 1:
                raise UnresolvedLocation(ind, f"conflicting values for {attr}")
            out.setdefault(ind, {})[attr] = float(vals[0])
    return out


def _successors(kb: KnowledgeBase, role: str) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for a in kb.abox:
        if isinstance(a, Related) and a.role == role:
            out.setdefault(a.subject, []).append(a.object)
    return out


@dataclass
class Locator:
    """Resolves individuals to points or areas.

    An individual is a point when it has a latitude and a longitude, an area
    when it has contour points, and otherwise takes the location of the
    nearest individual reachable over ``isLocated``.
    """

    kb: KnowledgeBase
    coords: dict = field(init=False)
    contour: dict = field(init=False)
    located: dict = field(init=False)

    def __post_init__(self):
        self.coords = _coordinates(self.kb)
        self.contour = _successors(self.kb, CONTOUR)
        self.located = _successors(self.kb, LOCATED)

    def own(self, ind: str) -> Optional[Location]:
        c = self.coords.get(ind)
        if c is not None and LATITUDE in c and LONGITUDE in c:
            return GeoPoint(c[LATITUDE], c[LONGITUDE])
        if ind in self.contour:
            pts = []
            for p in self.contour[ind]:
                loc = self.own(p)
                if not isinstance(loc, GeoPoint):
                    raise UnresolvedLocation(ind, f"contour point {p} has no coordinates")
                pts.append(loc)
            return GeoArea(tuple(pts))
        return None

    def resolve(self, ind: str) -> tuple[str, Location]:
        """(individual carrying the geometry, geometry)."""
        seen = {ind}
        level = [ind]
        while level:
            for x in level:
                loc = self.own(x)
                if loc is not None:
                    return x, loc
            nxt = []
            for x in level:
                for y in sorted(self.located.get(x, ())):
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            level = nxt
        raise UnresolvedLocation(ind, "no coordinates, contour or located-in chain")


@dataclass(frozen=True)
class DistanceFact:
    object_a: str
    object_b: str
    meters: float
    via: tuple[str, str] = ("", "")

    def __post_init__(self):
        if self.meters < 0:
            raise InvalidGeometry("negative distance")

    def key(self) -> frozenset:
        return frozenset((self.object_a, self.object_b))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistanceFact):
            return NotImplemented
        return self.key() == other.key() and self.meters == other.meters

    def __hash__(self) -> int:
        return hash((self.key(), self.meters))


def distance_between(kb: KnowledgeBase, a: str, b: str, locator: Optional[Locator] = None) -> DistanceFact:
    loc = locator or Locator(kb)
    ga, la = loc.resolve(a)
    gb, lb = loc.resolve(b)
    return DistanceFact(a, b, distance(la, lb), (ga, gb))


def emit_distance_facts(kb: KnowledgeBase, pairs: Sequence, prefix: str = "dist") -> list:
    """n-ary distance individuals for each pair.

    A pair is ``(a, b)`` or ``(a, b, name)``. Each fact is typed both as
    ``DistanceBetween2Objects`` (with ``hasDistance``) and as ``Distance``
    (with ``hasValue``), so rules written against either pattern see it.
    """
    loc = Locator(kb)
    integer_value = kb.attribute_type(HAS_VALUE) == INTEGER
    out: list = []
    for pair in pairs:
        a, b = pair[0], pair[1]
        name = pair[2] if len(pair) > 2 else f"{prefix}_{a}_{b}"
        fact = distance_between(kb, a, b, loc)
        meters = round(fact.meters, 3)
        value = int(round(fact.meters)) if integer_value else meters
        out += [
            InstanceOf(name, Name(DISTANCE_CONCEPT)),
            InstanceOf(name, Name(DISTANCE_RECORD)),
            Related(name, a, HAS_OBJECT),
            Related(name, b, HAS_OBJECT),
            AttrFiller(name, meters, HAS_DISTANCE),
            AttrFiller(name, value, HAS_VALUE),
        ]
    return out


# ---------------------------------------------------------------- compliance

COMPLIANT = "compliant"
VIOLATION = "violation"


def verdict_for(measured: float, threshold: float) -> str:
    return VIOLATION if measured < threshold else COMPLIANT


@dataclass
class ComplianceReport:
    turbine: str
    threshold_m: float
    measured_m: Optional[float]
    verdict: str
    nearest: Optional[str] = None
    fact: Optional[DistanceFact] = None
    evidence: list[str] = field(default_factory=list)
    note: str = ""
    constraint: str = "minimum distance to a residential area"

    @property
    def compliant(self) -> bool:
        return self.verdict == COMPLIANT

    def lines(self) -> list[str]:
        out = [f"turbine: {self.turbine}", f"constraint: {self.constraint} >= {self.threshold_m:g} m"]
        if self.measured_m is not None:
            out.append(f"nearest residential area: {self.nearest}")
            out.append(f"measured: {self.measured_m:.1f} m")
        out.append(f"verdict: {self.verdict}")
        if self.note:
            out.append(f"note: {self.note}")
        if self.evidence:
            out.append("evidence:")
            out.extend(f"  {e}" for e in self.evidence)
        return out

    def as_dict(self) -> dict:
        return {
            "turbine": self.turbine,
            "threshold_m": self.threshold_m,
            "measured_m": None if self.measured_m is None else round(self.measured_m, 3),
            "verdict": self.verdict,
            "nearest": self.nearest,
            "evidence": self.evidence,
            "note": self.note,
        }


def _type_chain(reasoner, individual: str, target: str) -> list[str]:
    told = reasoner.told_subsumers()
    asserted = sorted(
        a.concept.name
        for a in reasoner.kb.abox
        if isinstance(a, InstanceOf) and a.individual == individual and isinstance(a.concept, Name)
    )
    if target in asserted:
        return [f"{individual} : {target} (asserted)"]
    for start in asserted:
        if target in told.get(start, ()):
            chain = [f"{individual} : {start} (asserted)"]
            cur = start
            while cur != target:
                steps = [b for b in told.get(cur, ()) if b != cur and target in told.get(b, ())]
                # the step with the most subsumers of its own is the closest one
                nxt = max(steps, key=lambda b: (len(told.get(b, ())), b)) if steps else target
                chain.append(f"{cur} implies {nxt}")
                cur = nxt
            return chain
    return [f"{individual} : {target} (entailed)"]


def _asserted_distance(kb: KnowledgeBase, a: str, b: str) -> Optional[str]:
    from .query.rules import told_values

    objects = _successors(kb, HAS_OBJECT)
    values = told_values(kb)
    for d in sorted(objects):
        if {a, b} <= set(objects[d]):
            for attr in (HAS_VALUE, HAS_DISTANCE):
                vals = values.get((d, attr))
                if vals:
                    return f"asserted distance {d}: {attr} = {float(vals[0]):g}"
    return None


def check_compliance(
    kb: KnowledgeBase,
    turbine: str,
    threshold_m: float = 300.0,
    reasoner=None,
    residential: str = RESIDENTIAL,
) -> ComplianceReport:
    """Setback check of one turbine against the nearest residential area."""
    if threshold_m <= 0:
        raise ValueError("threshold must be positive")
    if turbine not in kb.individuals():
        raise UnknownIndividual(f"unknown individual {turbine}")
    if reasoner is None:
        from .reasoner.tableau import Reasoner

        reasoner = Reasoner(kb)
    loc = Locator(kb)
    site, _ = loc.resolve(turbine)
    places = [r for r in reasoner.instances(Name(residential)) if r != turbine]
    evidence = [f"{turbine} located at {site}"]
    if not places:
        return ComplianceReport(
            turbine,
            threshold_m,
            None,
            COMPLIANT,
            evidence=evidence,
            note=f"no instances of {residential}; the constraint holds vacuously",
        )
    facts = [distance_between(kb, turbine, r, loc) for r in places]
    best = min(facts, key=lambda f: (f.meters, f.object_b))
    evidence += _type_chain(reasoner, best.object_b, residential)
    if best.via[1] != best.object_b:
        evidence.append(f"{best.object_b} located at {best.via[1]}")
    evidence.append(f"computed distance {best.via[0]} to {best.via[1]}: {best.meters:.1f} m")
    told = _asserted_distance(kb, turbine, best.object_b)
    if told:
        evidence.append(told)
    return ComplianceReport(
        turbine,
        threshold_m,
        best.meters,
        verdict_for(best.meters, threshold_m),
        nearest=best.object_b,
        fact=best,
        evidence=evidence,
    )
