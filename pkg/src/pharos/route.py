"""Routes, segment headings and turning-point extraction.

Waypoints are taken to be pre-simplified: every interior waypoint is a
candidate decision point and becomes a turning point unless the turn there
classifies as Straight.
"""
from __future__ import annotations

import enum
import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidParams, ParseError, TooFewPoints, UnsupportedGeometry
from .geodesy import (Bearing, GeoPoint, RelativeAngle, haversine_distance, initial_bearing,
                      normalize_relative)

MIN_SEGMENT_M = 1.0


class TurnClass(enum.Enum):
    STRAIGHT = "Straight"
    SOFT_LEFT = "SoftLeft"
    SOFT_RIGHT = "SoftRight"
    LEFT = "Left"
    RIGHT = "Right"
    SHARP_LEFT = "SharpLeft"
    SHARP_RIGHT = "SharpRight"
    U_TURN = "UTurn"
    START = "Start"
    END = "End"


_MIRROR = {
    TurnClass.SOFT_LEFT: TurnClass.SOFT_RIGHT, TurnClass.SOFT_RIGHT: TurnClass.SOFT_LEFT,
    TurnClass.LEFT: TurnClass.RIGHT, TurnClass.RIGHT: TurnClass.LEFT,
    TurnClass.SHARP_LEFT: TurnClass.SHARP_RIGHT, TurnClass.SHARP_RIGHT: TurnClass.SHARP_LEFT,
}


def mirror_turn(tc: TurnClass) -> TurnClass:
    return _MIRROR.get(tc, tc)


@dataclass(frozen=True)
class Route:
    waypoints: tuple
    streets: Optional[tuple] = None

    def __post_init__(self):
        wps = tuple(self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        if len(wps) < 2:
            raise TooFewPoints(f"a route needs at least 2 waypoints, got {len(wps)}")
        for k in range(len(wps) - 1):
            if haversine_distance(wps[k], wps[k + 1]) < MIN_SEGMENT_M:
                raise InvalidParams(f"waypoints {k} and {k + 1} are closer than {MIN_SEGMENT_M} m")
        if self.streets is not None:
            streets = tuple(self.streets)
            if len(streets) != len(wps) - 1:
                raise InvalidParams(
                    f"expected {len(wps) - 1} street labels, got {len(streets)}")
            object.__setattr__(self, "streets", streets)

    def street(self, segment: int) -> Optional[str]:
        if self.streets is None:
            return None
        return self.streets[segment] or None

    def segment_lengths(self) -> list:
        w = self.waypoints
        return [haversine_distance(w[k], w[k + 1]) for k in range(len(w) - 1)]


@dataclass(frozen=True)
class TurningPoint:
    index: int
    location: GeoPoint
    turn_class: TurnClass
    incoming_heading: Optional[Bearing] = None
    outgoing_heading: Optional[Bearing] = None
    turn_angle: Optional[RelativeAngle] = field(default=None)


def build_route(points, streets=None) -> Route:
    """Route from raw points, merging consecutive points closer than 1 m.

    When two points merge, the label of the collapsed segment is dropped.
    """
    points = list(points)
    labels = list(streets) if streets is not None else None
    if labels is not None and len(labels) != max(len(points) - 1, 0):
        raise InvalidParams(f"expected {len(points) - 1} street labels, got {len(labels)}")
    if not points:
        raise TooFewPoints("route has no points")
    kept = [points[0]]
    kept_labels = []
    for k in range(1, len(points)):
        if haversine_distance(kept[-1], points[k]) < MIN_SEGMENT_M:
            continue
        kept.append(points[k])
        if labels is not None:
            kept_labels.append(labels[k - 1])
    if len(kept) < 2:
        raise TooFewPoints(f"route has fewer than 2 distinct points ({len(kept)})")
    return Route(tuple(kept), tuple(kept_labels) if labels is not None else None)


# --- parsing ------------------------------------------------------------------

def _linestring_from_geojson(obj):
    kind = obj.get("type") if isinstance(obj, dict) else None
    if kind == "FeatureCollection":
        feats = obj.get("features") or []
        lines = [f for f in feats if isinstance(f, dict)
                 and (f.get("geometry") or {}).get("type") == "LineString"]
        others = [f for f in feats if f not in lines]
        if others:
            bad = (others[0].get("geometry") or {}).get("type") if isinstance(others[0], dict) else None
            raise UnsupportedGeometry(f"unsupported geometry {bad!r} in FeatureCollection")
        if len(lines) != 1:
            raise UnsupportedGeometry(f"expected exactly one LineString, found {len(lines)}")
        return _linestring_from_geojson(lines[0])
    if kind == "Feature":
        geom = obj.get("geometry") or {}
        coords = _linestring_from_geojson(geom)[0]
        return coords, obj.get("properties") or {}
    if kind == "LineString":
        coords = obj.get("coordinates")
        if not isinstance(coords, list):
            raise ParseError("LineString coordinates must be an array")
        return coords, {}
    raise UnsupportedGeometry(f"unsupported geometry {kind!r}")


def parse_geojson_route(obj) -> Route:
    """Route from a GeoJSON LineString, Feature or single-line FeatureCollection.

    An optional ``streets`` property lists one label per segment.
    """
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    coords, props = _linestring_from_geojson(obj)
    points = []
    for k, c in enumerate(coords):
        try:
            lon, lat = float(c[0]), float(c[1])
            points.append(GeoPoint(lat, lon))
        except (TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"coordinate {k} is invalid: {exc}") from None
    if len(points) < 2:
        raise TooFewPoints(f"a route needs at least 2 waypoints, got {len(points)}")
    streets = props.get("streets")
    return build_route(points, streets)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_gpx_route(text: str) -> Route:
    """Route from a GPX document holding exactly one ``rte`` or ``trk``.

    Track segments of the single track are concatenated in order.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"invalid GPX: {exc}", exc.position[0]) from None
    if _local(root.tag) != "gpx":
        raise ParseError(f"root element is {_local(root.tag)!r}, not 'gpx'")
    rtes = [e for e in root if _local(e.tag) == "rte"]
    trks = [e for e in root if _local(e.tag) == "trk"]
    if len(rtes) + len(trks) != 1:
        raise UnsupportedGeometry(
            f"expected exactly one rte or trk, found {len(rtes)} rte and {len(trks)} trk")
    if rtes:
        pts = [e for e in rtes[0] if _local(e.tag) == "rtept"]
    else:
        pts = [p for seg in trks[0] if _local(seg.tag) == "trkseg"
               for p in seg if _local(p.tag) == "trkpt"]
    points = []
    for k, e in enumerate(pts):
        try:
            points.append(GeoPoint(float(e.attrib["lat"]), float(e.attrib["lon"])))
        except (KeyError, ValueError) as exc:
            raise ParseError(f"point {k} has invalid lat/lon: {exc}") from None
    if len(points) < 2:
        raise TooFewPoints(f"a route needs at least 2 waypoints, got {len(points)}")
    return build_route(points)


def parse_route(document) -> Route:
    """Parse GeoJSON (text or dict) or GPX text, sniffing the format."""
    if isinstance(document, dict):
        return parse_geojson_route(document)
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    if document.lstrip().startswith("<"):
        return parse_gpx_route(document)
    return parse_geojson_route(document)


# --- headings and turns -------------------------------------------------------

def segment_headings(route: Route) -> list:
    w = route.waypoints
    return [initial_bearing(w[k], w[k + 1]) for k in range(len(w) - 1)]


def classify_turn(turn_angle) -> TurnClass:
    """Bucket a signed turn angle; positive angles turn right.

    Bands are half-open upwards in ``|angle|``: [0, 22.5) straight,
    [22.5, 67.5) soft, [67.5, 157.5) regular, [157.5, 180] U-turn.
    """
    a = normalize_relative(turn_angle.deg if isinstance(turn_angle, RelativeAngle)
                           else turn_angle).deg
    mag = abs(a)
    if mag < 22.5:
        return TurnClass.STRAIGHT
    if mag >= 157.5:
        return TurnClass.U_TURN
    right = a > 0
    if mag < 67.5:
        return TurnClass.SOFT_RIGHT if right else TurnClass.SOFT_LEFT
    return TurnClass.RIGHT if right else TurnClass.LEFT


def extract_turning_points(route: Route) -> list:
    heads = segment_headings(route)
    w = route.waypoints
    out = [TurningPoint(0, w[0], TurnClass.START, outgoing_heading=heads[0])]
    for k in range(1, len(w) - 1):
        incoming, outgoing = heads[k - 1], heads[k]
        angle = normalize_relative(outgoing.deg - incoming.deg)
        tc = classify_turn(angle)
        if tc is TurnClass.STRAIGHT:
            continue
        out.append(TurningPoint(k, w[k], tc, incoming, outgoing, angle))
    out.append(TurningPoint(len(w) - 1, w[-1], TurnClass.END, incoming_heading=heads[-1]))
    return out
