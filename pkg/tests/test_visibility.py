import itertools
import json
import logging
import math

import numpy as np
import pytest

from oracles import lattice_count
from pharos.errors import (EmptyManifest, InvalidParams, MalformedRecord, ObserverOutsideGrid,
                           ParseError)
from pharos.geodesy import GeoPoint, destination_point, haversine_distance
from pharos.terrain import HeightGrid
from pharos.visibility import (Clip, Landmark, SampleVerdict, Source, Visibility, VisibilityMap,
                               build_visibility_map_viewshed, dumps_geojson, generate_grid,
                               grid_to_geojson, ingest_classifications, lattice_indices,
                               line_of_sight_visible, lookup_visibility, map_from_geojson,
                               map_to_geojson, read_classification_manifest)

CENTER = GeoPoint(0.0, 0.0)
CS = 0.0001  # about 11.1 m cells at the equator


def square_grid(values, center=CENTER, cs=CS):
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    half = n * cs / 2
    return HeightGrid(values.shape[1], n, center.lon_deg - half, center.lat_deg - half, cs, values)


def flat_grid(n=64, h=0.0):
    return square_grid(np.full((n, n), h))


def tower(height=10.0, base=0.0):
    return Landmark("t", "the tower", CENTER, base, height)


# --- lattice ------------------------------------------------------------------

@pytest.mark.parametrize("radius, spacing", [(2000, 100), (1000, 100), (1000, 300), (250, 50),
                                             (99, 10), (5, 5)])
def test_lattice_counts_match_brute_force(radius, spacing):
    for clip in Clip:
        got = len(generate_grid(GeoPoint(48, 11), radius, spacing, clip))
        assert got == lattice_count(radius, spacing, clip is Clip.DISK)


def test_lattice_is_exact_for_decimal_inputs():
    # 0.3 / 0.1 is 2.9999999999999996 in floats; the lattice must still use n = 3
    assert len(lattice_indices(0.3, 0.1)) == 49
    assert (3, 0) in lattice_indices(0.3, 0.1, Clip.DISK)


def test_grid_order_and_center():
    pts = generate_grid(CENTER, 200, 100)
    assert pts[len(pts) // 2] == CENTER
    idx = lattice_indices(200, 100)
    assert idx == sorted(idx)
    assert idx[0] == (-2, -2) and idx[1] == (-2, -1)
    # i counts east: the first points lie west of the center
    assert pts[0].lon_deg < 0 and pts[0].lat_deg < 0


def test_disk_points_within_radius():
    c = GeoPoint(53, 8.8)
    for p in generate_grid(c, 2000, 100, "disk"):
        assert haversine_distance(c, p) <= 2000 + 0.5


def test_points_are_separated():
    c = GeoPoint(60, 25)
    pts = generate_grid(c, 500, 100)
    for a, b in itertools.combinations(pts, 2):
        assert haversine_distance(a, b) >= 0.9 * 100


@pytest.mark.parametrize("radius, spacing", [(0, 10), (100, 0), (100, -1), (10, 100),
                                             (math.inf, 10), (100, math.nan)])
def test_grid_rejects_bad_params(radius, spacing):
    with pytest.raises(InvalidParams):
        generate_grid(CENTER, radius, spacing)


def test_grid_geojson_shape():
    doc = grid_to_geojson(generate_grid(CENTER, 100, 100))
    assert doc["type"] == "FeatureCollection"
    assert len(doc["features"]) == 9
    assert doc["features"][0]["properties"] == {}


# --- line of sight ------------------------------------------------------------

def test_flat_terrain_sees_everything():
    g = flat_grid()
    for p in generate_grid(CENTER, 300, 50):
        assert line_of_sight_visible(p, 1.7, tower(), g) is Visibility.VISIBLE


def test_wall_blocks_view():
    vals = np.zeros((64, 64))
    vals[:, 40] = 300.0  # a north-south wall east of the tower
    g = square_grid(vals)
    east = destination_point(CENTER, 90, 250)
    west = destination_point(CENTER, 270, 250)
    assert line_of_sight_visible(east, 1.7, tower(), g) is Visibility.NOT_VISIBLE
    assert line_of_sight_visible(west, 1.7, tower(), g) is Visibility.VISIBLE
    # a tall enough tower clears the wall again
    assert line_of_sight_visible(east, 1.7, tower(2000.0), g) is Visibility.VISIBLE


def test_observer_on_landmark_sees_it():
    g = flat_grid(h=50.0)
    assert line_of_sight_visible(CENTER, 0.0, tower(1.0, base=0.0), g) is Visibility.VISIBLE


def test_observer_outside_grid():
    g = flat_grid(16)
    far = destination_point(CENTER, 0, 5000)
    with pytest.raises(ObserverOutsideGrid):
        line_of_sight_visible(far, 1.7, tower(), g)


def test_negative_eye_height_rejected():
    with pytest.raises(InvalidParams):
        line_of_sight_visible(CENTER, -1, tower(), flat_grid())


def test_visibility_is_monotone_in_landmark_height():
    rng = np.random.default_rng(11)
    g = square_grid(rng.uniform(0, 40, (32, 32)))
    pts = generate_grid(CENTER, 150, 30)
    for p in pts:
        seen = False
        for h in (1, 5, 20, 60, 200, 1000):
            v = line_of_sight_visible(p, 1.7, tower(h), g) is Visibility.VISIBLE
            assert v or not seen
            seen = v


def test_nodata_counts_as_ground_and_is_reported(caplog):
    vals = np.zeros((32, 32))
    vals[10:20, 10:20] = -9999.0
    g = square_grid(vals)
    m = build_visibility_map_viewshed(tower(), g, 150, 50)
    assert all(s.state is Visibility.VISIBLE for s in m.samples)
    assert "nodata" in caplog.text


def test_no_warning_without_nodata(caplog):
    with caplog.at_level(logging.INFO, logger="pharos"):
        build_visibility_map_viewshed(tower(), flat_grid(), 150, 50)
    assert "nodata" not in caplog.text


def test_map_matches_pointwise_los():
    rng = np.random.default_rng(5)
    g = square_grid(rng.uniform(0, 30, (48, 48)))
    lm = tower(25.0)
    m = build_visibility_map_viewshed(lm, g, 200, 40, "disk", 1.7)
    pts = generate_grid(CENTER, 200, 40, "disk")
    assert [s.location for s in m.samples] == pts
    for s in m.samples:
        assert s.source is Source.VIEWSHED
        assert s.state is line_of_sight_visible(s.location, 1.7, lm, g)
    assert m.clip is Clip.DISK and m.radius_m == 200


def test_points_off_the_grid_are_excluded():
    # landmark on the western edge: about half the lattice falls off the grid
    vals = np.zeros((40, 40))
    g = HeightGrid(40, 40, 0.0, -0.002, CS, vals)
    lm = Landmark("t", "t", GeoPoint(0.0, 0.0001), 0, 10)
    m = build_visibility_map_viewshed(lm, g, 200, 50)
    assert 0 < len(m.samples) < len(generate_grid(lm.location, 200, 50))
    assert all(s.location.lon_deg >= 0.0 for s in m.samples)


def test_unknown_forbidden_for_viewshed():
    with pytest.raises(InvalidParams):
        SampleVerdict(CENTER, Visibility.UNKNOWN, Source.VIEWSHED)


# --- classified imagery -------------------------------------------------------

def test_ingest_dedups_within_a_meter():
    a = GeoPoint(10, 10)
    near = destination_point(a, 45, 0.5)
    far = destination_point(a, 45, 50)
    m = ingest_classifications([("1", a, True), ("2", far, False), ("3", near, False)], "lm", 100)
    assert len(m.samples) == 2
    assert m.samples[0].location == near and m.samples[0].state is Visibility.NOT_VISIBLE
    assert m.samples[1].state is Visibility.NOT_VISIBLE
    assert all(s.source is Source.CLASSIFIED for s in m.samples)
    assert m.clip is None and m.radius_m is None


def test_ingest_rejects_empty_and_malformed():
    with pytest.raises(EmptyManifest):
        ingest_classifications([], "lm", 100)
    with pytest.raises(MalformedRecord, match="row 2"):
        ingest_classifications([("a", CENTER, True), ("b", CENTER, "yes")], "lm", 100)


def test_manifest_parsing():
    text = "image_id,lat,lon,visible\nimg1,53.0,8.8,true\nimg2,53.001,8.8,0\nimg3,53.002,8.8,TRUE\n"
    recs = read_classification_manifest(text)
    assert [r[0] for r in recs] == ["img1", "img2", "img3"]
    assert [r[2] for r in recs] == [True, False, True]
    assert recs[1][1] == GeoPoint(53.001, 8.8)


@pytest.mark.parametrize("body, row", [("a,1,2,maybe\n", 1), ("a,1,2,true\nb,x,2,true\n", 2),
                                       ("a,1,2,true\nb,95,2,true\n", 2), ("a,1,2\n", 1)])
def test_manifest_errors_name_the_row(body, row):
    with pytest.raises(MalformedRecord, match=f"row {row}"):
        read_classification_manifest("image_id,lat,lon,visible\n" + body)


def test_manifest_header_and_empty():
    with pytest.raises(ParseError):
        read_classification_manifest("id,lat,lon\na,1,2\n")
    with pytest.raises(EmptyManifest):
        read_classification_manifest("image_id,lat,lon,visible\n")


# --- lookup -------------------------------------------------------------------

def _map(points_states, spacing=100.0):
    samples = tuple(SampleVerdict(p, s, Source.CLASSIFIED) for p, s in points_states)
    return VisibilityMap("lm", spacing, samples)


def test_lookup_nearest_within_radius():
    a, b = GeoPoint(0, 0), destination_point(GeoPoint(0, 0), 90, 100)
    m = _map([(a, Visibility.VISIBLE), (b, Visibility.NOT_VISIBLE)])
    assert lookup_visibility(m, destination_point(a, 90, 30)) is Visibility.VISIBLE
    assert lookup_visibility(m, destination_point(a, 90, 70)) is Visibility.NOT_VISIBLE
    assert lookup_visibility(m, destination_point(a, 0, 74)) is Visibility.VISIBLE
    assert lookup_visibility(m, destination_point(a, 0, 76)) is Visibility.UNKNOWN


def test_lookup_tie_goes_to_smaller_lat_lon():
    a, b = GeoPoint(0, -0.0005), GeoPoint(0, 0.0005)
    m = _map([(b, Visibility.VISIBLE), (a, Visibility.NOT_VISIBLE)])
    assert lookup_visibility(m, GeoPoint(0, 0)) is Visibility.NOT_VISIBLE


def test_lookup_on_empty_map():
    assert lookup_visibility(_map([]), CENTER) is Visibility.UNKNOWN


# --- GeoJSON ------------------------------------------------------------------

def test_viewshed_map_geojson_round_trip():
    rng = np.random.default_rng(2)
    g = square_grid(rng.uniform(0, 30, (32, 32)))
    m = build_visibility_map_viewshed(tower(20), g, 150, 50, "square")
    text = dumps_geojson(map_to_geojson(m))
    back = map_from_geojson(text)
    assert back == m
    assert dumps_geojson(map_to_geojson(back)) == text
    doc = json.loads(text)
    assert doc["clip"] == "square" and doc["spacing_m"] == 50
    assert set(doc["features"][0]["properties"]) == {"visible", "source"}


def test_classified_map_round_trip_has_null_clip():
    m = ingest_classifications([("a", GeoPoint(1, 2), True)], "lm", 25)
    doc = map_to_geojson(m)
    assert doc["clip"] is None and doc["radius_m"] is None
    assert map_from_geojson(doc) == m


def test_map_from_geojson_errors():
    with pytest.raises(ParseError):
        map_from_geojson("{not json")
    with pytest.raises(ParseError):
        map_from_geojson({"type": "FeatureCollection", "features": []})
