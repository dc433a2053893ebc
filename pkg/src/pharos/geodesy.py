"""Spherical-earth geodesy: distances, bearings, destinations, angle wrapping.

Conventions used throughout the package:

* bearings are degrees clockwise from true north, in ``[0, 360)``;
* relative angles are ``bearing_to_target - heading`` wrapped into
  ``(-180, 180]``, positive meaning the target lies to the right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CoincidentPoints, InvalidParams, OutOfProjectionRange

EARTH_RADIUS_M = 6_371_000.0
"""Mean Earth radius in meters."""

MAX_PROJECTION_DISTANCE_M = 50_000.0
MAX_PROJECTION_LAT_DEG = 85.0
_COINCIDENT_DEG = 1e-12


def wrap_bearing(deg: float) -> float:
    """Wrap ``deg`` into ``[0, 360)``."""
    r = math.fmod(deg, 360.0)
    if r < 0.0:
        r += 360.0
    if r >= 360.0:
        # tiny negatives round up to 360.0
        r = 0.0
    return r + 0.0


def normalize_relative(raw_deg: float) -> RelativeAngle:
    """Wrap ``raw_deg`` into ``(-180, 180]``.

    fmod is exact and the single +/-360 correction falls under Sterbenz's
    lemma, so the result is exact: ``normalize_relative(x + 360 * k)`` equals
    ``normalize_relative(x)`` whenever ``x + 360 * k`` is itself exact.
    """
    return RelativeAngle(raw_deg)


def _wrap_relative(deg: float) -> float:
    if not math.isfinite(deg):
        raise InvalidParams(f"angle must be finite, got {deg!r}")
    r = math.fmod(deg, 360.0)
    if r > 180.0:
        r -= 360.0
    elif r <= -180.0:
        r += 360.0
    return r + 0.0


def _wrap_lon(lon: float) -> float:
    if -180.0 < lon <= 180.0:
        return lon + 0.0
    return _wrap_relative(lon)


@dataclass(frozen=True)
class GeoPoint:
    lat_deg: float
    lon_deg: float

    def __post_init__(self):
        lat, lon = float(self.lat_deg), float(self.lon_deg)
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise InvalidParams(f"non-finite coordinate ({lat}, {lon})")
        if not -90.0 <= lat <= 90.0:
            raise InvalidParams(f"latitude {lat} outside [-90, 90]")
        object.__setattr__(self, "lat_deg", lat)
        object.__setattr__(self, "lon_deg", _wrap_lon(lon))

    def as_tuple(self) -> tuple[float, float]:
        return (self.lat_deg, self.lon_deg)


@dataclass(frozen=True)
class Bearing:
    deg: float

    def __post_init__(self):
        d = float(self.deg)
        if not math.isfinite(d):
            raise InvalidParams(f"bearing must be finite, got {d!r}")
        object.__setattr__(self, "deg", wrap_bearing(d))


@dataclass(frozen=True)
class RelativeAngle:
    deg: float

    def __post_init__(self):
        object.__setattr__(self, "deg", _wrap_relative(float(self.deg)))


@dataclass(frozen=True)
class EnuOffset:
    east_m: float
    north_m: float


def _deg(b) -> float:
    return b.deg if isinstance(b, (Bearing, RelativeAngle)) else float(b)


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters between two points."""
    lat1, lat2 = math.radians(a.lat_deg), math.radians(b.lat_deg)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon_deg - a.lon_deg)
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def initial_bearing(origin: GeoPoint, to: GeoPoint) -> Bearing:
    """Initial great-circle bearing from ``origin`` towards ``to``.

    Raises CoincidentPoints when both points agree to within 1e-12 degrees.
    """
    if (abs(origin.lat_deg - to.lat_deg) <= _COINCIDENT_DEG
            and abs(_wrap_relative(origin.lon_deg - to.lon_deg)) <= _COINCIDENT_DEG):
        raise CoincidentPoints(f"bearing undefined between coincident points {origin} and {to}")
    lat1, lat2 = math.radians(origin.lat_deg), math.radians(to.lat_deg)
    dlon = math.radians(to.lon_deg - origin.lon_deg)
    y = math.sin(dlon) * math.cos(lat2)
    # cos(lat1)sin(lat2) - sin(lat1)cos(lat2)cos(dlon), rewritten without cancellation
    x = math.sin(lat2 - lat1) + 2.0 * math.sin(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return Bearing(math.degrees(math.atan2(y, x)))


def destination_point(origin: GeoPoint, bearing, distance_m: float) -> GeoPoint:
    """Point reached by travelling ``distance_m`` along a great circle that
    leaves ``origin`` with the given initial bearing."""
    if distance_m < 0:
        raise InvalidParams(f"distance must be >= 0, got {distance_m}")
    if distance_m == 0:
        return origin
    delta = distance_m / EARTH_RADIUS_M
    theta = math.radians(_deg(bearing))
    lat1, lon1 = math.radians(origin.lat_deg), math.radians(origin.lon_deg)
    sin_lat2 = (math.sin(lat1) * math.cos(delta)
                + math.cos(lat1) * math.sin(delta) * math.cos(theta))
    lat2 = math.asin(max(-1.0, min(1.0, sin_lat2)))
    lon2 = lon1 + math.atan2(math.sin(theta) * math.sin(delta) * math.cos(lat1),
                             math.cos(delta) - math.sin(lat1) * sin_lat2)
    return GeoPoint(math.degrees(lat2), math.degrees(lon2))


def midpoint_along(a: GeoPoint, b: GeoPoint, fraction: float = 0.5) -> GeoPoint:
    """Point at ``fraction`` of the great-circle arc from ``a`` to ``b``."""
    d = haversine_distance(a, b)
    if d == 0:
        return a
    return destination_point(a, initial_bearing(a, b), d * fraction)


def _check_projection_origin(origin: GeoPoint):
    if abs(origin.lat_deg) > MAX_PROJECTION_LAT_DEG:
        raise OutOfProjectionRange(
            f"local projection unsupported at |lat| > {MAX_PROJECTION_LAT_DEG}: {origin.lat_deg}")


def to_local_enu(origin: GeoPoint, point: GeoPoint) -> EnuOffset:
    """Equirectangular east/north offset of ``point`` from ``origin`` in meters."""
    _check_projection_origin(origin)
    if haversine_distance(origin, point) > MAX_PROJECTION_DISTANCE_M:
        raise OutOfProjectionRange(
            f"{point} is more than {MAX_PROJECTION_DISTANCE_M:g} m from origin {origin}")
    k = math.pi / 180.0 * EARTH_RADIUS_M
    dlon = _wrap_relative(point.lon_deg - origin.lon_deg)
    east = dlon * k * math.cos(math.radians(origin.lat_deg))
    north = (point.lat_deg - origin.lat_deg) * k
    return EnuOffset(east, north)


def from_local_enu(origin: GeoPoint, offset: EnuOffset) -> GeoPoint:
    """Inverse of :func:`to_local_enu`."""
    _check_projection_origin(origin)
    k = math.pi / 180.0 * EARTH_RADIUS_M
    lat = origin.lat_deg + offset.north_m / k
    lon = origin.lon_deg + offset.east_m / (k * math.cos(math.radians(origin.lat_deg)))
    return GeoPoint(lat, lon)
