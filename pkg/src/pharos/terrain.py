"""Surface height rasters stored as ESRI ASCII grids.

Row 0 of ``values`` is the northernmost row, as in the file format. Cell
centers sit at ``xllcorner + (col + 0.5) * cellsize`` and
``yllcorner + (nrows - row - 0.5) * cellsize``.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionError, ParseError
from .geodesy import GeoPoint

DEFAULT_NODATA = -9999.0

_REQUIRED_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")
_HEADER_KEYS = _REQUIRED_KEYS + ("nodata_value",)


class GridSample(enum.Enum):
    NODATA = "nodata"
    OUT_OF_BOUNDS = "out_of_bounds"


@dataclass(frozen=True, eq=False)
class HeightGrid:
    ncols: int
    nrows: int
    xllcorner: float
    yllcorner: float
    cell_size_deg: float
    values: np.ndarray = field(repr=False)
    nodata_value: float = DEFAULT_NODATA

    def __post_init__(self):
        if self.ncols < 2 or self.nrows < 2:
            raise DimensionError(f"grid must be at least 2x2, got {self.ncols}x{self.nrows}")
        if not (self.cell_size_deg > 0 and math.isfinite(self.cell_size_deg)):
            raise DimensionError(f"cellsize must be positive, got {self.cell_size_deg}")
        values = np.array(self.values, dtype=float).reshape(self.nrows, self.ncols)
        if not np.all(np.isfinite(values)):
            raise ParseError("grid contains non-finite heights")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def llcorner(self) -> GeoPoint:
        return GeoPoint(self.yllcorner, self.xllcorner)

    @cached_property
    def nodata_mask(self) -> np.ndarray:
        return self.values == self.nodata_value

    @cached_property
    def filled(self) -> np.ndarray:
        """Heights with nodata cells replaced by 0, flipped so row 0 is south."""
        out = np.where(self.nodata_mask, 0.0, self.values)[::-1].copy()
        out.setflags(write=False)
        return out

    def __eq__(self, other):
        if not isinstance(other, HeightGrid):
            return NotImplemented
        return (self.ncols == other.ncols and self.nrows == other.nrows
                and self.xllcorner == other.xllcorner and self.yllcorner == other.yllcorner
                and self.cell_size_deg == other.cell_size_deg
                and self.nodata_value == other.nodata_value
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def fractional_index(self, p: GeoPoint) -> tuple[float, float]:
        """(column, south-up row) position of ``p`` in cell-center units."""
        x = (p.lon_deg - self.xllcorner) / self.cell_size_deg - 0.5
        y = (p.lat_deg - self.yllcorner) / self.cell_size_deg - 0.5
        return x, y

    def in_hull(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.ncols - 1 and 0.0 <= y <= self.nrows - 1


def _cell_origin(f: float, n: int) -> int:
    return min(max(int(math.floor(f)), 0), n - 2)


def sample_height(grid: HeightGrid, p: GeoPoint):
    """Bilinear height at ``p`` from the four surrounding cell centers.

    Returns ``GridSample.OUT_OF_BOUNDS`` outside the hull of cell centers and
    ``GridSample.NODATA`` if any contributing cell is nodata.
    """
    x, y = grid.fractional_index(p)
    if not grid.in_hull(x, y):
        return GridSample.OUT_OF_BOUNDS
    c0 = _cell_origin(x, grid.ncols)
    r0 = _cell_origin(y, grid.nrows)
    fx, fy = x - c0, y - r0
    rows = grid.nrows - 1 - r0, grid.nrows - 2 - r0  # south row, north row
    corners = grid.values[np.ix_(rows, (c0, c0 + 1))]
    weights = np.array([[(1 - fx) * (1 - fy), fx * (1 - fy)],
                        [(1 - fx) * fy, fx * fy]])
    mask = corners == grid.nodata_value
    # a corner with zero weight still counts as contributing
    if mask.any():
        return GridSample.NODATA
    return float((corners * weights).sum())


def load_ascii_grid(stream) -> HeightGrid:
    """Parse an ESRI ASCII grid from a text stream or string."""
    text = stream if isinstance(stream, str) else stream.read()
    lines = text.splitlines()
    header = {}
    lineno = 0
    while lineno < len(lines):
        stripped = lines[lineno].strip()
        if not stripped:
            lineno += 1
            continue
        parts = stripped.split()
        key = parts[0].lower()
        if key not in _HEADER_KEYS:
            break
        if len(parts) != 2:
            raise ParseError(f"header entry {parts[0]!r} needs exactly one value", lineno + 1)
        if key in header:
            raise ParseError(f"duplicate header key {parts[0]!r}", lineno + 1)
        header[key] = (parts[1], lineno + 1)
        lineno += 1

    missing = [k for k in _REQUIRED_KEYS if k not in header]
    if missing:
        raise ParseError(f"missing header keys: {', '.join(missing)}", lineno + 1)

    def number(key, kind=float):
        raw, ln = header[key]
        try:
            return kind(raw)
        except ValueError:
            raise ParseError(f"{key} value {raw!r} is not a valid {kind.__name__}", ln) from None

    ncols = number("ncols", int)
    nrows = number("nrows", int)
    if ncols < 2 or nrows < 2:
        raise DimensionError(f"grid must be at least 2x2, got {ncols}x{nrows}")
    nodata = number("nodata_value") if "nodata_value" in header else DEFAULT_NODATA

    expected = ncols * nrows
    values = []
    for i in range(lineno, len(lines)):
        for tok in lines[i].split():
            try:
                v = float(tok)
            except ValueError:
                raise ParseError(f"non-numeric token {tok!r}", i + 1) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {tok!r}", i + 1)
            values.append(v)
            if len(values) > expected:
                raise ParseError(f"expected {expected} values, found more", i + 1)
    if len(values) != expected:
        raise ParseError(f"expected {expected} values, found {len(values)}", len(lines))

    return HeightGrid(ncols=ncols, nrows=nrows,
                      xllcorner=number("xllcorner"), yllcorner=number("yllcorner"),
                      cell_size_deg=number("cellsize"), values=values,
                      nodata_value=nodata)


def _fmt(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def write_ascii_grid(grid: HeightGrid) -> str:
    """Serialize ``grid`` so that ``load_ascii_grid`` restores it exactly."""
    out = io.StringIO()
    out.write(f"ncols {grid.ncols}\n")
    out.write(f"nrows {grid.nrows}\n")
    out.write(f"xllcorner {repr(float(grid.xllcorner))}\n")
    out.write(f"yllcorner {repr(float(grid.yllcorner))}\n")
    out.write(f"cellsize {repr(float(grid.cell_size_deg))}\n")
    out.write(f"nodata_value {_fmt(float(grid.nodata_value))}\n")
    for row in grid.values:
        out.write(" ".join(_fmt(float(v)) for v in row))
        out.write("\n")
    return out.getvalue()
