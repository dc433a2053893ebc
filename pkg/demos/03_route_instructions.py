"""
Instructions along a short walk
===============================

A small grid-city walk with the tower always visible except behind one block.
Compare the landmark-enriched sequence with the plain turn-by-turn baseline.
"""

# %%
from pharos.geodesy import EnuOffset, GeoPoint, from_local_enu
from pharos.route import build_route, extract_turning_points
from pharos.instructions import dumps_jsonl, generate_route_instructions
from pharos.visibility import (Landmark, SampleVerdict, Source, Visibility, VisibilityMap,
                               generate_grid)

tower = Landmark("tv", "the TV tower", GeoPoint(53.0, 8.8), 0, 235)


def at(e, n):
    return from_local_enu(tower.location, EnuOffset(e, n))


route = build_route([at(300, -100), at(300, 100), at(500, 100), at(500, 300), at(700, 300)],
                    ["Deichstrasse", "Hafenweg", "Elm Street", "Lindenallee"])
for tp in extract_turning_points(route):
    print(tp.index, tp.turn_class.value)

# %%
# Hand-made map: hidden in the block north of 150 m and east of 450 m
samples = []
for p in generate_grid(tower.location, 900, 50):
    hidden = p.lat_deg > at(0, 150).lat_deg and p.lon_deg > at(450, 0).lon_deg
    samples.append(SampleVerdict(p, Visibility.NOT_VISIBLE if hidden else Visibility.VISIBLE,
                                 Source.CLASSIFIED))
vmap = VisibilityMap("tv", 50.0, tuple(samples))

# %%
for ins in generate_route_instructions(route, tower, vmap):
    bell = "*" if ins.notify else " "
    print(f"{bell} {ins.kind.value:17s} {ins.text}")

# %%
print(dumps_jsonl(generate_route_instructions(route, tower, vmap, landmark_phrases=False)))
