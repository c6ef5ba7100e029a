"""CSV map layers to ABox assertions.

Ingestion is semantics-free: which potential class a point has, or whether a
road is an access road, is left to the TBox.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO, Union

from .errors import InvalidGeometry
from .geo import GeoPoint
from .model.concepts import Name
from .model.kb import AttrFiller, InstanceOf, Related

WIND_HEADER = ("lat", "lon", "height_m", "wind_speed_ms")
ROAD_HEADER = ("road_id", "width_m", "points")
MAP_HEIGHTS = (15, 50, 100)


@dataclass(frozen=True)
class WindMapRow:
    latitude: float
    longitude: float
    measured_height: int
    wind_speed: float

    def __post_init__(self):
        GeoPoint(self.latitude, self.longitude)
        if self.measured_height not in MAP_HEIGHTS:
            raise ValueError(f"height {self.measured_height} m is not a map level {MAP_HEIGHTS}")
        if not self.wind_speed >= 0:
            raise ValueError(f"wind speed {self.wind_speed} must be non-negative")


@dataclass(frozen=True)
class RoadRow:
    road_id: str
    width: float
    polyline: tuple[GeoPoint, ...]

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"width {self.width} must be positive")
        if len(self.polyline) < 2 or len(set(self.polyline)) < 2:
            raise ValueError("a road needs at least two distinct points")


@dataclass
class RowDiagnostic:
    row: int  # 1-based data row number; the header is row 0
    message: str

    def __str__(self) -> str:
        return f"row {self.row}: {self.message}"


@dataclass
class IngestResult:
    assertions: list = field(default_factory=list)
    accepted: int = 0
    diagnostics: list[RowDiagnostic] = field(default_factory=list)

    @property
    def rejected(self) -> int:
        return len(self.diagnostics)

    @property
    def rows(self) -> int:
        return self.accepted + self.rejected

    def to_krss(self, abox: str = "") -> str:
        lines = [f"(init-abox {abox})"] if abox else []
        lines += [str(a) for a in self.assertions]
        return "\n".join(lines) + ("\n" if lines else "")


class SchemaError(ValueError):
    """The file does not have the expected header."""


def _number(text: str, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ValueError(f"{what} {text!r} is not a number") from None
    if not math.isfinite(v):
        raise ValueError(f"{what} {text!r} is not finite")
    return v


def _reader(stream: Union[TextIO, str], header: tuple[str, ...]):
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    rows = csv.reader(stream)
    try:
        first = next(rows)
    except StopIteration:
        raise SchemaError(f"empty file; expected header {','.join(header)}") from None
    if tuple(h.strip().lstrip("\ufeff") for h in first) != header:
        raise SchemaError(f"expected header {','.join(header)}, got {','.join(first)}")
    for i, row in enumerate(rows, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        yield i, [c.strip() for c in row]


def parse_wind_row(cells: list[str]) -> WindMapRow:
    if len(cells) != len(WIND_HEADER):
        raise ValueError(f"expected {len(WIND_HEADER)} fields, got {len(cells)}")
    lat = _number(cells[0], "latitude")
    lon = _number(cells[1], "longitude")
    height = _number(cells[2], "height")
    if height != int(height):
        raise ValueError(f"height {cells[2]} is not a whole number of meters")
    speed = _number(cells[3], "wind speed")
    try:
        return WindMapRow(lat, lon, int(height), speed)
    except InvalidGeometry as e:
        raise ValueError(str(e)) from None


def ingest_wind_map(stream: Union[TextIO, str], prefix: str = "point") -> IngestResult:
    """One ``Point`` per row named ``point_<row>``, with coordinates, the
    map height and the wind speed as fillers."""
    out = IngestResult()
    for i, cells in _reader(stream, WIND_HEADER):
        try:
            row = parse_wind_row(cells)
        except ValueError as e:
            out.diagnostics.append(RowDiagnostic(i, str(e)))
            continue
        name = f"{prefix}_{i}"
        out.assertions += [
            InstanceOf(name, Name("Point")),
            AttrFiller(name, row.latitude, "hasLatitude"),
            AttrFiller(name, row.longitude, "hasLongitude"),
            AttrFiller(name, row.measured_height, "hasMeasuredHeight"),
            AttrFiller(name, row.wind_speed, "windSpeed"),
        ]
        out.accepted += 1
    return out


def parse_road_row(cells: list[str]) -> RoadRow:
    if len(cells) != len(ROAD_HEADER):
        raise ValueError(f"expected {len(ROAD_HEADER)} fields, got {len(cells)}")
    road_id = cells[0]
    if not road_id or any(ch.isspace() or ch in "()\";" for ch in road_id):
        raise ValueError(f"road id {road_id!r} is not a usable symbol")
    width = _number(cells[1], "width")
    pts = []
    for chunk in cells[2].split(";"):
        parts = chunk.split()
        if len(parts) != 2:
            raise ValueError(f"point {chunk!r} is not 'lat lon'")
        try:
            pts.append(GeoPoint(_number(parts[0], "latitude"), _number(parts[1], "longitude")))
        except InvalidGeometry as e:
            raise ValueError(str(e)) from None
    return RoadRow(road_id, width, tuple(pts))


def ingest_roads(stream: Union[TextIO, str]) -> IngestResult:
    """``Road`` individuals with a ``width`` filler and their polyline as
    ordered ``hasRoadPoint`` points."""
    out = IngestResult()
    for i, cells in _reader(stream, ROAD_HEADER):
        try:
            row = parse_road_row(cells)
        except ValueError as e:
            out.diagnostics.append(RowDiagnostic(i, str(e)))
            continue
        road = row.road_id if row.road_id[0].isalpha() else f"road_{row.road_id}"
        out.assertions += [InstanceOf(road, Name("Road")), AttrFiller(road, row.width, "width")]
        for k, p in enumerate(row.polyline, start=1):
            pt = f"{road}_pt{k}"
            out.assertions += [
                Related(road, pt, "hasRoadPoint"),
                AttrFiller(pt, p.latitude, "hasLatitude"),
                AttrFiller(pt, p.longitude, "hasLongitude"),
            ]
        out.accepted += 1
    return out


INGESTERS = {"wind-map": ingest_wind_map, "roads": ingest_roads}


def ingest(kind: str, stream: Union[TextIO, str]) -> IngestResult:
    try:
        fn = INGESTERS[kind]
    except KeyError:
        raise ValueError(f"unknown input kind {kind!r}; expected one of {', '.join(INGESTERS)}") from None
    return fn(stream)


def merge(results: Iterable[IngestResult]) -> IngestResult:
    out = IngestResult()
    for r in results:
        out.assertions.extend(a for a in r.assertions if a not in out.assertions)
        out.accepted += r.accepted
        out.diagnostics.extend(r.diagnostics)
    return out
