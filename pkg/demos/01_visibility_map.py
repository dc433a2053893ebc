"""
Visibility map around a tower
=============================

Build a height grid with a single ridge, sample a lattice around a tower
and ask, for every lattice point, whether the top of the tower can be seen.
"""

# %%
import numpy as np

from pharos.geodesy import GeoPoint, to_local_enu
from pharos.terrain import HeightGrid, write_ascii_grid
from pharos.visibility import (Landmark, Visibility, build_visibility_map_viewshed,
                               generate_grid, lookup_visibility)

tower = Landmark("tv", "the TV tower", GeoPoint(53.0, 8.8), base_elevation_m=0, height_m=80)

# %%
# Roughly 1 km square of 0.0001 degree cells (11 m north-south, 6.7 m
# east-west here), flat except for a 60 m ridge 150 m east of the tower.
cs = 0.0001
ncols, nrows = 150, 92
xll, yll = 8.8 - ncols * cs / 2, 53.0 - nrows * cs / 2
heights = np.zeros((nrows, ncols))
for col in range(ncols):
    east = to_local_enu(tower.location, GeoPoint(53.0, xll + (col + 0.5) * cs)).east_m
    if 150 <= east < 170:
        heights[:, col] = 60.0
grid = HeightGrid(ncols, nrows, xll, yll, cs, heights)
print(write_ascii_grid(grid).splitlines()[:6])

# %%
# Square vs disk sampling at 50 m spacing
square = generate_grid(tower.location, 400, 50, "square")
disk = generate_grid(tower.location, 400, 50, "disk")
print(len(square), "square samples,", len(disk), "disk samples")

# %%
vmap = build_visibility_map_viewshed(tower, grid, 400, 50, "square", eye_height_m=1.7)
print(vmap.counts())

# a crude text rendering, north at the top
rows = {}
for s in vmap.samples:
    off = to_local_enu(tower.location, s.location)
    rows.setdefault(round(off.north_m), []).append("#" if s.state is Visibility.VISIBLE else ".")
for north in sorted(rows, reverse=True):
    print(" ".join(rows[north]))

# %%
# Any point can be looked up; points further than 0.75 spacing from every
# sample are Unknown.
for east in (100, 250, 420, 600):
    p = GeoPoint(53.0, 8.8 + east / (111_195 * np.cos(np.radians(53))))
    print(east, "m east:", lookup_visibility(vmap, p).value)
