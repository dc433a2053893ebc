"""Landmark visibility maps.

A map is a lattice of sample points around a landmark, each carrying a
visible / not-visible verdict. Verdicts come either from a line-of-sight
test over a height grid or from a manifest of externally classified,
geotagged images.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (EmptyManifest, InvalidParams, MalformedRecord, ObserverOutsideGrid,
                     ParseError)
from .geodesy import (EARTH_RADIUS_M, GeoPoint, destination_point, haversine_distance,
                      to_local_enu)
from .terrain import HeightGrid

log = logging.getLogger(__name__)

DEFAULT_EYE_HEIGHT_M = 1.7
LOOKUP_RADIUS_FACTOR = 0.75
DEDUP_RADIUS_M = 1.0
_TIE_TOLERANCE_M = 1e-6


class Clip(enum.Enum):
    SQUARE = "square"
    DISK = "disk"


class Visibility(enum.Enum):
    VISIBLE = "visible"
    NOT_VISIBLE = "not_visible"
    UNKNOWN = "unknown"


class Source(enum.Enum):
    VIEWSHED = "viewshed"
    CLASSIFIED = "classified"


@dataclass(frozen=True)
class Landmark:
    id: str
    name: str
    location: GeoPoint
    base_elevation_m: float = 0.0
    height_m: float = 1.0

    def __post_init__(self):
        if not self.height_m > 0:
            raise InvalidParams(f"landmark height must be > 0, got {self.height_m}")
        if not self.name:
            raise InvalidParams("landmark name must be non-empty")

    @property
    def top_elevation_m(self) -> float:
        return self.base_elevation_m + self.height_m


@dataclass(frozen=True)
class SampleVerdict:
    location: GeoPoint
    state: Visibility
    source: Source

    def __post_init__(self):
        if self.state is Visibility.UNKNOWN and self.source is Source.VIEWSHED:
            raise InvalidParams("viewshed samples are never Unknown")


@dataclass(frozen=True)
class VisibilityMap:
    landmark_id: str
    spacing_m: float
    samples: tuple
    clip: Optional[Clip] = None
    radius_m: Optional[float] = None

    @cached_property
    def _coords(self):
        lat = np.radians([s.location.lat_deg for s in self.samples])
        lon = np.radians([s.location.lon_deg for s in self.samples])
        return lat, lon

    def counts(self) -> Counter:
        return Counter(s.state for s in self.samples)


# --- sampling lattice -------------------------------------------------------

def _check_grid_params(radius_m, spacing_m):
    if not (radius_m > 0 and math.isfinite(radius_m)):
        raise InvalidParams(f"radius must be > 0, got {radius_m}")
    if not (spacing_m > 0 and math.isfinite(spacing_m)):
        raise InvalidParams(f"spacing must be > 0, got {spacing_m}")
    if spacing_m > radius_m:
        raise InvalidParams(f"spacing {spacing_m} exceeds radius {radius_m}")


def lattice_indices(radius_m: float, spacing_m: float, clip=Clip.SQUARE):
    """Integer lattice offsets ``(i, j)`` (east, north) kept by ``clip``, sorted."""
    _check_grid_params(radius_m, spacing_m)
    clip = Clip(clip)
    # decimal reading of the inputs, so 1.0 / 0.1 gives exactly 10
    ratio = Fraction(repr(float(radius_m))) / Fraction(repr(float(spacing_m)))
    n = math.floor(ratio)
    keep_sq = ratio * ratio
    out = []
    for i in range(-n, n + 1):
        for j in range(-n, n + 1):
            if clip is Clip.DISK and i * i + j * j > keep_sq:
                continue
            out.append((i, j))
    return out


def lattice_point(center: GeoPoint, i: int, j: int, spacing_m: float) -> GeoPoint:
    east, north = i * spacing_m, j * spacing_m
    if i == 0 and j == 0:
        return center
    return destination_point(center, math.degrees(math.atan2(east, north)),
                             math.hypot(east, north))


def generate_grid(center: GeoPoint, radius_m: float, spacing_m: float,
                  clip=Clip.SQUARE) -> list:
    """Sample points on a square lattice centered on ``center``.

    Lattice offset ``(i * spacing, j * spacing)`` in the local tangent plane is
    mapped back to the sphere as a single great-circle hop from ``center``,
    which keeps the distance to the center exact. Points are ordered by
    ``(i, j)`` with ``i`` counting east and ``j`` north.
    """
    return [lattice_point(center, i, j, spacing_m)
            for i, j in lattice_indices(radius_m, spacing_m, clip)]


# --- line of sight ------------------------------------------------------------

def _cell_size_m(grid: HeightGrid, lat_deg: float) -> float:
    k = math.pi / 180.0 * EARTH_RADIUS_M
    return grid.cell_size_deg * k * min(1.0, math.cos(math.radians(lat_deg)))


def _bilinear(grid: HeightGrid, x: float, y: float) -> tuple[float, bool]:
    f = grid.filled
    c0 = min(max(int(math.floor(x)), 0), grid.ncols - 2)
    r0 = min(max(int(math.floor(y)), 0), grid.nrows - 2)
    fx, fy = x - c0, y - r0
    h = (f[r0, c0] * (1 - fx) * (1 - fy) + f[r0, c0 + 1] * fx * (1 - fy)
         + f[r0 + 1, c0] * (1 - fx) * fy + f[r0 + 1, c0 + 1] * fx * fy)
    hit = bool(grid.nodata_mask[::-1][r0:r0 + 2, c0:c0 + 2].any())
    return float(h), hit


def _crossings(start: float, delta: float, t_hi: float) -> np.ndarray:
    if delta == 0:
        return np.empty(0)
    end = start + delta * t_hi
    lo, hi = sorted((start, end))
    ks = np.arange(math.floor(lo) + 1, math.ceil(hi))
    return (ks - start) / delta


def _hull_limit(start: float, delta: float, upper: float) -> float:
    if delta > 0:
        return (upper - start) / delta
    if delta < 0:
        return -start / delta
    return math.inf


def max_surface_slope(grid: HeightGrid, x0: float, y0: float, x1: float, y1: float,
                      eye_elev: float, length_m: float, nodata_hits: Optional[Counter] = None):
    """Supremum of ``(surface - eye_elev) / horizontal distance`` along a ray.

    The ray runs in fractional cell-center coordinates from ``(x0, y0)``
    (the observer) towards ``(x1, y1)``; ``length_m`` is its horizontal length.
    Along a straight line the bilinear surface is a quadratic in the ray
    parameter within each cell, so the supremum is found exactly from each
    piece's endpoints and its single stationary point. Ray portions outside
    the grid hull are ignored. Returns ``-inf`` if nothing is sampled.
    """
    dx, dy = x1 - x0, y1 - y0
    t_hi = min(1.0, _hull_limit(x0, dx, grid.ncols - 1), _hull_limit(y0, dy, grid.nrows - 1))
    if t_hi <= 0:
        return -math.inf
    ts = np.concatenate(([0.0, t_hi], _crossings(x0, dx, t_hi), _crossings(y0, dy, t_hi)))
    ts = np.unique(ts[(ts >= 0) & (ts <= t_hi)])
    ta, tb = ts[:-1], ts[1:]
    keep = tb > ta
    ta, tb = ta[keep], tb[keep]
    if ta.size == 0:
        return -math.inf

    tm = 0.5 * (ta + tb)
    c0 = np.clip(np.floor(x0 + dx * tm).astype(int), 0, grid.ncols - 2)
    r0 = np.clip(np.floor(y0 + dy * tm).astype(int), 0, grid.nrows - 2)
    f = grid.filled
    h00, h10 = f[r0, c0], f[r0, c0 + 1]
    h01, h11 = f[r0 + 1, c0], f[r0 + 1, c0 + 1]
    if nodata_hits is not None:
        m = grid.nodata_mask[::-1]
        hits = m[r0, c0] | m[r0, c0 + 1] | m[r0 + 1, c0] | m[r0 + 1, c0 + 1]
        if hits.any():
            nodata_hits["nodata_pieces"] += int(hits.sum())

    # h(t) = qa + qb t + qc t^2 on each piece
    B, C, E = h10 - h00, h01 - h00, h00 - h10 - h01 + h11
    lx, ly = x0 - c0, y0 - r0
    qa = h00 + B * lx + C * ly + E * lx * ly - eye_elev
    qb = B * dx + C * dy + E * (lx * dy + ly * dx)
    qc = E * dx * dy

    def slope(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return (qa + qb * t + qc * t * t) / (t * length_m)

    best = -math.inf
    s_b = slope(tb)
    best = max(best, float(np.max(s_b)))
    pos = ta > 0
    if pos.any():
        best = max(best, float(np.max(slope(ta)[pos])))
    if not pos[0]:
        # limit at the observer itself
        if qa[0] > 0:
            return math.inf
        if qa[0] == 0:
            best = max(best, float(qb[0] / length_m))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstar = np.sqrt(qa / qc)
    ok = (qc != 0) & np.isfinite(tstar) & (tstar > ta) & (tstar < tb)
    if ok.any():
        best = max(best, float(np.max(slope(tstar)[ok])))
    return best


def line_of_sight_visible(observer: GeoPoint, eye_height_m: float, landmark: Landmark,
                          terrain: HeightGrid, nodata_hits: Optional[Counter] = None) -> Visibility:
    """Whether the top of ``landmark`` can be seen from ``observer``.

    The eye sits ``eye_height_m`` above the bilinear surface at the observer.
    The landmark is visible iff the elevation angle to its top strictly
    exceeds the elevation angle to every surface point strictly between the
    observer and the landmark base. Observers within half a cell of the
    landmark see it by convention. Nodata cells count as height 0 and are
    tallied in ``nodata_hits`` when given.
    """
    if eye_height_m < 0:
        raise InvalidParams(f"eye height must be >= 0, got {eye_height_m}")
    xo, yo = terrain.fractional_index(observer)
    if not terrain.in_hull(xo, yo):
        raise ObserverOutsideGrid(f"observer {observer} lies outside the terrain grid")
    off = to_local_enu(landmark.location, observer)
    dist = math.hypot(off.east_m, off.north_m)
    if dist < _cell_size_m(terrain, landmark.location.lat_deg) / 2:
        return Visibility.VISIBLE

    ground, hit = _bilinear(terrain, xo, yo)
    if hit and nodata_hits is not None:  # observer stands on a nodata cell
        nodata_hits["nodata_observer"] += 1
    eye = ground + eye_height_m
    target_slope = (landmark.top_elevation_m - eye) / dist
    xl, yl = terrain.fractional_index(landmark.location)
    worst = max_surface_slope(terrain, xo, yo, xl, yl, eye, dist, nodata_hits)
    return Visibility.VISIBLE if target_slope > worst else Visibility.NOT_VISIBLE


def build_visibility_map_viewshed(landmark: Landmark, terrain: HeightGrid, radius_m: float,
                                  spacing_m: float, clip=Clip.SQUARE,
                                  eye_height_m: float = DEFAULT_EYE_HEIGHT_M) -> VisibilityMap:
    """Line-of-sight verdict for every lattice point that lies on the terrain."""
    clip = Clip(clip)
    hits = Counter()
    samples = []
    skipped = 0
    for p in generate_grid(landmark.location, radius_m, spacing_m, clip):
        try:
            state = line_of_sight_visible(p, eye_height_m, landmark, terrain, hits)
        except ObserverOutsideGrid:
            skipped += 1
            continue
        samples.append(SampleVerdict(p, state, Source.VIEWSHED))
    if skipped:
        log.info("excluded %d sample points outside the terrain grid", skipped)
    if hits:
        log.warning("nodata cells treated as height 0 (%d ray pieces, %d observers)",
                    hits["nodata_pieces"], hits["nodata_observer"])
    return VisibilityMap(landmark.id, float(spacing_m), tuple(samples), clip, float(radius_m))


# --- classified imagery -------------------------------------------------------

def ingest_classifications(records: Iterable, landmark_id: str, spacing_m: float) -> VisibilityMap:
    """Visibility map from ``(image_id, GeoPoint, predicted)`` records.

    Records closer than 1 m to an already kept sample replace it in place
    (later record wins). Sample order follows first appearance.
    """
    if not spacing_m > 0:
        raise InvalidParams(f"spacing must be > 0, got {spacing_m}")
    kept: list = []
    lat = np.empty(0)
    lon = np.empty(0)
    n = 0
    for row, rec in enumerate(records, start=1):
        n += 1
        try:
            _image_id, loc, predicted = rec
        except (TypeError, ValueError):
            raise MalformedRecord("expected (image_id, location, predicted)", row) from None
        if not isinstance(loc, GeoPoint) or not isinstance(predicted, (bool, np.bool_)):
            raise MalformedRecord("location must be a GeoPoint and predicted a bool", row)
        state = Visibility.VISIBLE if predicted else Visibility.NOT_VISIBLE
        verdict = SampleVerdict(loc, state, Source.CLASSIFIED)
        if kept:
            d = _haversine_many(loc, lat, lon)
            k = int(np.argmin(d))
            if d[k] < DEDUP_RADIUS_M:
                kept[k] = verdict
                lat[k], lon[k] = math.radians(loc.lat_deg), math.radians(loc.lon_deg)
                continue
        kept.append(verdict)
        lat = np.append(lat, math.radians(loc.lat_deg))
        lon = np.append(lon, math.radians(loc.lon_deg))
    if n == 0:
        raise EmptyManifest("classification manifest has no records")
    return VisibilityMap(landmark_id, float(spacing_m), tuple(kept))


_TRUE = {"true", "1"}
_FALSE = {"false", "0"}


def parse_bool(raw: str) -> bool:
    v = raw.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ValueError(f"expected true/false/1/0, got {raw!r}")


def read_classification_manifest(stream) -> list:
    """Parse a ``image_id,lat,lon,visible`` CSV into ingestion records.

    Row numbers in errors count data rows from 1 (the header is row 0).
    """
    text = stream if isinstance(stream, str) else stream.read()
    reader = csv.DictReader(io.StringIO(text, newline=""))
    need = {"image_id", "lat", "lon", "visible"}
    if reader.fieldnames is None or not need <= {f.strip() for f in reader.fieldnames}:
        raise ParseError(f"manifest header must contain {sorted(need)}", 1)
    records = []
    for row, raw in enumerate(reader, start=1):
        raw = {k.strip(): v for k, v in raw.items() if k is not None}
        try:
            if any(raw.get(k) is None for k in need):
                raise ValueError("missing column value")
            loc = GeoPoint(float(raw["lat"]), float(raw["lon"]))
            vis = parse_bool(raw["visible"])
        except ValueError as exc:
            raise MalformedRecord(str(exc), row) from None
        records.append((raw["image_id"].strip(), loc, vis))
    if not records:
        raise EmptyManifest("classification manifest has no records")
    return records


# --- lookup -----------------------------------------------------------------

def _haversine_many(p: GeoPoint, lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
    plat, plon = math.radians(p.lat_deg), math.radians(p.lon_deg)
    h = (np.sin((lat - plat) / 2) ** 2
         + math.cos(plat) * np.cos(lat) * np.sin((lon - plon) / 2) ** 2)
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def lookup_visibility(vmap: VisibilityMap, p: GeoPoint) -> Visibility:
    """Verdict of the nearest sample within 0.75 spacing of ``p``, else Unknown.

    Samples whose distances agree to within a micrometer count as tied; the
    tie goes to the lexicographically smaller ``(lat, lon)``.
    """
    if not vmap.samples:
        return Visibility.UNKNOWN
    lat, lon = vmap._coords
    d = _haversine_many(p, lat, lon)
    best = float(d.min())
    if best > LOOKUP_RADIUS_FACTOR * vmap.spacing_m:
        return Visibility.UNKNOWN
    tied = np.flatnonzero(d <= best + _TIE_TOLERANCE_M)
    k = min(tied, key=lambda i: vmap.samples[i].location.as_tuple())
    return vmap.samples[k].state


# --- GeoJSON ------------------------------------------------------------------

_VISIBLE_JSON = {Visibility.VISIBLE: True, Visibility.NOT_VISIBLE: False,
                 Visibility.UNKNOWN: None}


def map_to_geojson(vmap: VisibilityMap) -> dict:
    features = [{
        "type": "Feature",
        "geometry": {"type": "Point",
                     "coordinates": [s.location.lon_deg, s.location.lat_deg]},
        "properties": {"visible": _VISIBLE_JSON[s.state], "source": s.source.value},
    } for s in vmap.samples]
    return {
        "type": "FeatureCollection",
        "landmark_id": vmap.landmark_id,
        "spacing_m": vmap.spacing_m,
        "radius_m": vmap.radius_m,
        "clip": vmap.clip.value if vmap.clip else None,
        "features": features,
    }


def dumps_geojson(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n"


def map_from_geojson(obj) -> VisibilityMap:
    """Inverse of :func:`map_to_geojson`; accepts a dict or JSON text."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(obj, dict) or obj.get("type") != "FeatureCollection":
        raise ParseError("visibility map must be a GeoJSON FeatureCollection")
    try:
        spacing = float(obj["spacing_m"])
        landmark_id = str(obj["landmark_id"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("visibility map needs landmark_id and spacing_m members") from None
    clip = Clip(obj["clip"]) if obj.get("clip") else None
    radius = float(obj["radius_m"]) if obj.get("radius_m") is not None else None
    samples = []
    for idx, feat in enumerate(obj.get("features", [])):
        try:
            lon, lat = feat["geometry"]["coordinates"][:2]
            props = feat["properties"]
            vis = props["visible"]
            source = Source(props["source"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"feature {idx} is not a visibility sample") from None
        state = {True: Visibility.VISIBLE, False: Visibility.NOT_VISIBLE,
                 None: Visibility.UNKNOWN}[vis]
        samples.append(SampleVerdict(GeoPoint(lat, lon), state, source))
    return VisibilityMap(landmark_id, spacing, tuple(samples), clip, radius)


def grid_to_geojson(points: Sequence[GeoPoint]) -> dict:
    return {
        "type": "FeatureCollection",
        "features": [{"type": "Feature",
                      "geometry": {"type": "Point", "coordinates": [p.lon_deg, p.lat_deg]},
                      "properties": {}} for p in points],
    }
