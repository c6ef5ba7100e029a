import pytest

from windkb.corpus import load_corpus
from windkb.ingest import SchemaError, ingest, ingest_roads, ingest_wind_map, merge
from windkb.loader import load_text
from windkb.model import concepts as C
from windkb.model.kb import AttrFiller, InstanceOf
from windkb.query.engine import QueryEngine

WIND = "lat,lon,height_m,wind_speed_ms\n44.1,27.1,50,5.0\n44.2,27.2,50,8.0\n44.3,27.3,50,11.0\n"


def test_three_rows_give_three_points():
    res = ingest_wind_map(WIND)
    assert res.accepted == 3 and res.rejected == 0
    points = [a for a in res.assertions if isinstance(a, InstanceOf)]
    assert [p.individual for p in points] == ["point_1", "point_2", "point_3"]
    assert all(p.concept == C.Name("Point") for p in points)
    assert sum(isinstance(a, AttrFiller) for a in res.assertions) == 12


def test_invalid_rows_are_reported_and_skipped():
    text = WIND + "95,27,50,6\n44,27,20,6\n44,27,50,-1\n44,27,abc,6\n44,27,50\n\n44.4,27.4,100,7\n"
    res = ingest_wind_map(text)
    assert res.accepted == 4 and res.rejected == 5
    assert [d.row for d in res.diagnostics] == [4, 5, 6, 7, 8]
    assert "latitude" in str(res.diagnostics[0])
    assert "map level" in str(res.diagnostics[1])


def test_wrong_header_is_a_schema_error():
    with pytest.raises(SchemaError):
        ingest_wind_map("latitude,longitude,h,v\n1,2,50,3\n")
    with pytest.raises(SchemaError):
        ingest_wind_map("")
    with pytest.raises(ValueError, match="unknown input kind"):
        ingest("rainfall", WIND)


def test_ingested_assertions_round_trip_through_krss():
    res = ingest_wind_map(WIND)
    loaded = load_text(res.to_krss("map"))
    assert loaded.ok
    assert set(loaded.kb.abox) == set(res.assertions)


def test_potential_classes_come_from_the_tbox():
    kb = load_corpus().kb
    kb.add_all(ingest_wind_map(WIND).assertions)
    eng = QueryEngine(kb)
    got = {n: [i for i in eng.concept_instances(C.Name(n)) if i.startswith("point_")]
           for n in ("MarginalPotentialat50", "PromisingPotentialat50", "ExcellentPotentialat50")}
    assert got == {
        "MarginalPotentialat50": ["point_1"],
        "PromisingPotentialat50": ["point_2"],
        "ExcellentPotentialat50": ["point_3"],
    }


def test_roads():
    text = "road_id,width_m,points\nr1,5.0,44.1 27.1;44.2 27.2\n7,3.5,44 27;44.1 27\nbad,0,1 1;2 2\nr3,4,1 1\n"
    res = ingest_roads(text)
    assert res.accepted == 2 and res.rejected == 2
    kinds = {str(a) for a in res.assertions if isinstance(a, InstanceOf)}
    assert kinds == {"(instance r1 Road)", "(instance road_7 Road)"}
    kb = load_corpus().kb
    kb.add_all(res.assertions)
    eng = QueryEngine(kb)
    access = eng.concept_instances(C.Name("TurbineAccessRoad"))
    assert "r1" in access and "road_7" not in access


def test_merge_drops_duplicates():
    a = ingest_wind_map(WIND)
    m = merge([a, ingest_wind_map(WIND)])
    assert len(m.assertions) == len(a.assertions) and m.accepted == 6
