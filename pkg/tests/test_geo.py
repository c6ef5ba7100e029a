import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from windkb.corpus import load_corpus
from windkb.errors import DegenerateArea, InvalidGeometry, UnknownIndividual, UnresolvedLocation
from windkb.geo import (
    EARTH_RADIUS_M,
    GeoArea,
    GeoPoint,
    Locator,
    check_compliance,
    distance,
    emit_distance_facts,
    haversine,
    min_distance_point_area,
)
from windkb.loader import load_text

points = st.builds(
    GeoPoint,
    st.floats(-90, 90, allow_nan=False),
    st.floats(-180, 180, allow_nan=False),
)


@given(points)
def test_distance_to_itself_is_zero(p):
    assert haversine(p, p) == 0


def test_quarter_circumference():
    expected = math.pi / 2 * EARTH_RADIUS_M
    for p, q in [
        (GeoPoint(0, 0), GeoPoint(90, 0)),
        (GeoPoint(0, 0), GeoPoint(0, 90)),
        (GeoPoint(0, -45), GeoPoint(0, 45)),
    ]:
        assert abs(haversine(p, q) - expected) <= 1e-6 * expected


def test_symmetry_and_triangle_inequality_on_random_triples():
    rng = random.Random(42)

    def rand():
        return GeoPoint(math.degrees(math.asin(rng.uniform(-1, 1))), rng.uniform(-180, 180))

    for _ in range(1000):
        a, b, c = rand(), rand(), rand()
        ab, ba = haversine(a, b), haversine(b, a)
        assert abs(ab - ba) <= 1e-6 * max(ab, 1.0)
        assert ab <= (haversine(a, c) + haversine(c, b)) * (1 + 1e-6) + 1e-9


@given(points, points)
def test_haversine_is_bounded_by_half_circumference(p, q):
    assert 0 <= haversine(p, q) <= math.pi * EARTH_RADIUS_M * (1 + 1e-12)


def test_bad_coordinates_are_rejected():
    for lat, lon in [(91, 0), (0, 181), (float("nan"), 0), (0, float("inf"))]:
        with pytest.raises(InvalidGeometry):
            GeoPoint(lat, lon)


SQUARE = GeoArea((GeoPoint(0, 0), GeoPoint(0, 0.01), GeoPoint(0.01, 0.01), GeoPoint(0.01, 0)))


def test_point_inside_or_on_an_area_is_at_zero():
    assert min_distance_point_area(GeoPoint(0.005, 0.005), SQUARE) == 0
    assert min_distance_point_area(GeoPoint(0, 0.005), SQUARE) == 0
    assert min_distance_point_area(GeoPoint(0, 0), SQUARE) == 0


def test_point_outside_an_area_measures_to_the_nearest_edge():
    # due south of the bottom edge, the nearest point is straight up
    p = GeoPoint(-0.001, 0.005)
    assert min_distance_point_area(p, SQUARE) == pytest.approx(haversine(p, GeoPoint(0, 0.005)), rel=1e-4)
    # off a corner the nearest point is the vertex
    q = GeoPoint(-0.001, -0.001)
    assert distance(q, SQUARE) == pytest.approx(haversine(q, GeoPoint(0, 0)), rel=1e-4)


def test_area_to_area():
    other = GeoArea((GeoPoint(0, 0.02), GeoPoint(0, 0.03), GeoPoint(0.01, 0.03)))
    assert distance(SQUARE, other) == pytest.approx(haversine(GeoPoint(0, 0.01), GeoPoint(0, 0.02)), rel=1e-3)


def test_degenerate_and_self_intersecting_areas():
    with pytest.raises(InvalidGeometry):
        GeoArea((GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(0, 0)))
    with pytest.raises(InvalidGeometry, match="intersects"):
        GeoArea((GeoPoint(0, 0), GeoPoint(0.01, 0.01), GeoPoint(0, 0.01), GeoPoint(0.01, 0)))
    line = GeoArea((GeoPoint(0, 0), GeoPoint(0, 0.01), GeoPoint(0, 0.02)))
    with pytest.raises(DegenerateArea):
        min_distance_point_area(GeoPoint(1, 1), line)


def test_locator_follows_located_chains():
    kb = load_text(
        """
(define-primitive-role isLocated :transitive t)
(attribute-filler p 44.0 hasLatitude)
(attribute-filler p 27.0 hasLongitude)
(related t h isLocated)
(related h p isLocated)
(instance loose Village)
"""
    ).kb
    loc = Locator(kb)
    assert loc.resolve("t") == ("p", GeoPoint(44.0, 27.0))
    with pytest.raises(UnresolvedLocation):
        loc.resolve("loose")


def test_setback_scenario():
    kb = load_corpus().kb
    at300 = check_compliance(kb, "wt1", 300)
    assert at300.verdict == "violation" and 279 <= at300.measured_m <= 281
    assert at300.nearest == "v1"
    assert any("geonames:ResidentialArea" in e for e in at300.evidence)
    assert check_compliance(kb, "wt1", 250).compliant
    wt2 = check_compliance(kb, "wt2", 300)
    assert wt2.compliant and wt2.measured_m > 800


def test_compliance_input_errors():
    kb = load_corpus().kb
    with pytest.raises(UnknownIndividual):
        check_compliance(kb, "nobody")
    with pytest.raises(ValueError):
        check_compliance(kb, "wt1", 0)


def test_compliance_without_residential_areas_is_vacuous():
    kb = load_text("(attribute-filler t 1 hasLatitude)\n(attribute-filler t 2 hasLongitude)").kb
    rep = check_compliance(kb, "t")
    assert rep.compliant and rep.measured_m is None and "vacuously" in rep.note


def test_distance_facts_use_both_patterns():
    kb = load_corpus().kb
    facts = emit_distance_facts(kb, [("wt1", "v1", "dd")])
    text = {str(f) for f in facts}
    assert "(instance dd DistanceBetween2Objects)" in text and "(instance dd Distance)" in text
    assert sum(1 for f in facts if "hasObject" in str(f)) == 2
