"""Sliding-window / image-pyramid harness and precision-recall evaluation.

Pixel data never enters this module. A classifier is any deterministic
function scoring ``(image_id, WindowRect)`` in ``[0, 1]``; an image contains
the landmark when at least one window on any pyramid level scores at or
above the threshold.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import (EmptyRecordSet, IdMismatch, ImageSmallerThanWindow, InvalidParams,
                     MalformedRecord, ParseError, WindowLargerThanImage)

WINDOW_PX = 256
STEP_PX = 64
PYRAMID_FACTOR = 2.0


@dataclass(frozen=True)
class ImageDims:
    width_px: int
    height_px: int

    def __post_init__(self):
        if self.width_px < 1 or self.height_px < 1:
            raise InvalidParams(f"image dimensions must be >= 1, got {self.width_px}x{self.height_px}")


@dataclass(frozen=True)
class WindowRect:
    level_index: int
    scale: float
    x_px: int
    y_px: int
    size_px: int


@dataclass(frozen=True)
class PyramidLevel:
    level_index: int
    scale: float
    dims: ImageDims


@dataclass(frozen=True)
class ClassifierContract:
    score: Callable[[str, WindowRect], float]
    threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise InvalidParams(f"threshold must lie in [0, 1], got {self.threshold}")

    def is_positive(self, image_id: str, window: WindowRect) -> bool:
        return self.score(image_id, window) >= self.threshold


def axis_positions(dim: int, window_px: int = WINDOW_PX, step_px: int = STEP_PX) -> list:
    """Window offsets along one axis, with a final flush-to-edge position."""
    span = dim - window_px
    pos = list(range(0, span + 1, step_px))
    if span % step_px:
        pos.append(span)
    return pos


def enumerate_windows(level_dims: ImageDims, window_px: int = WINDOW_PX,
                      step_px: int = STEP_PX, level_index: int = 0,
                      scale: float = 1.0) -> list:
    """All square windows on one pyramid level, row-major (y outer, x inner)."""
    if step_px < 1:
        raise InvalidParams(f"step must be >= 1, got {step_px}")
    if window_px > min(level_dims.width_px, level_dims.height_px):
        raise WindowLargerThanImage(
            f"{window_px}px window does not fit {level_dims.width_px}x{level_dims.height_px}")
    xs = axis_positions(level_dims.width_px, window_px, step_px)
    ys = axis_positions(level_dims.height_px, window_px, step_px)
    return [WindowRect(level_index, scale, x, y, window_px) for y in ys for x in xs]


def build_pyramid(dims: ImageDims, factor: float = PYRAMID_FACTOR,
                  min_side: int = WINDOW_PX) -> list:
    """Successively downscaled levels; level k has sides floor(side / factor**k)."""
    if not factor > 1:
        raise InvalidParams(f"pyramid factor must be > 1, got {factor}")
    if min(dims.width_px, dims.height_px) < min_side:
        raise ImageSmallerThanWindow(
            f"{dims.width_px}x{dims.height_px} image is smaller than {min_side}px")
    levels = []
    k = 0
    while True:
        f = factor ** k
        w, h = math.floor(dims.width_px / f), math.floor(dims.height_px / f)
        if min(w, h) < min_side:
            break
        levels.append(PyramidLevel(k, 1.0 / f, ImageDims(w, h)))
        k += 1
    return levels


def iter_windows(dims: ImageDims, window_px: int = WINDOW_PX, step_px: int = STEP_PX,
                 factor: float = PYRAMID_FACTOR):
    for level in build_pyramid(dims, factor, window_px):
        yield from enumerate_windows(level.dims, window_px, step_px,
                                     level.level_index, level.scale)


def image_contains_landmark(classifier: ClassifierContract, image_id: str, dims: ImageDims,
                            window_px: int = WINDOW_PX, step_px: int = STEP_PX,
                            factor: float = PYRAMID_FACTOR) -> bool:
    return any(classifier.is_positive(image_id, w)
               for w in iter_windows(dims, window_px, step_px, factor))


@dataclass(frozen=True)
class EvalCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d else 0.0

    @property
    def recall(self) -> float:
        d = self.tp + self.fn
        return self.tp / d if d else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "EvalCounts") -> "EvalCounts":
        return EvalCounts(self.tp + other.tp, self.fp + other.fp,
                          self.fn + other.fn, self.tn + other.tn)

    def report(self) -> dict:
        """Counts plus metrics scaled by 100 and rounded to 2 decimals."""
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
                "precision": round(100 * self.precision, 2),
                "recall": round(100 * self.recall, 2),
                "f1": round(100 * self.f1, 2)}

    def report_json(self) -> str:
        r = self.report()
        body = ", ".join(
            f'"{k}": {r[k]:.2f}' if k in ("precision", "recall", "f1") else f'"{k}": {r[k]}'
            for k in ("tp", "fp", "fn", "tn", "precision", "recall", "f1"))
        return "{" + body + "}\n"


def evaluate(records: Iterable) -> EvalCounts:
    """Confusion counts from ``(predicted, truth)`` pairs."""
    tp = fp = fn = tn = 0
    n = 0
    for predicted, truth in records:
        n += 1
        if predicted and truth:
            tp += 1
        elif predicted:
            fp += 1
        elif truth:
            fn += 1
        else:
            tn += 1
    if n == 0:
        raise EmptyRecordSet("no records to evaluate")
    return EvalCounts(tp, fp, fn, tn)


def evaluate_grouped(groups: Mapping[str, Iterable]) -> EvalCounts:
    """Micro-average: pool the confusion counts of every group."""
    total = EvalCounts(0, 0, 0, 0)
    for records in groups.values():
        total = total + evaluate(records)
    return total


# --- manifests ----------------------------------------------------------------

def _read_column(text: str, column: str, parse) -> dict:
    reader = csv.DictReader(io.StringIO(text, newline=""))
    fields = [f.strip() for f in reader.fieldnames or []]
    if "image_id" not in fields or column not in fields:
        raise ParseError(f"CSV header must contain image_id,{column}", 1)
    out = {}
    for row, raw in enumerate(reader, start=1):
        raw = {k.strip(): v for k, v in raw.items() if k is not None}
        if raw.get("image_id") is None or raw.get(column) is None:
            raise MalformedRecord("missing column value", row)
        try:
            out[raw["image_id"].strip()] = parse(raw[column])
        except ValueError as exc:
            raise MalformedRecord(str(exc), row) from None
    if not out:
        raise EmptyRecordSet("CSV has no rows")
    return out


def _parse_truth(raw: str) -> bool:
    v = raw.strip().lower()
    if v in ("true", "1"):
        return True
    if v in ("false", "0"):
        return False
    raise ValueError(f"expected true/false, got {raw!r}")


def _parse_prediction(threshold: float):
    def parse(raw: str) -> bool:
        v = raw.strip().lower()
        if v in ("true", "false"):
            return v == "true"
        score = float(v)
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"score {raw!r} outside [0, 1]")
        return score >= threshold
    return parse


def read_truth_csv(text: str) -> dict:
    return _read_column(text, "truth", _parse_truth)


def read_predictions_csv(text: str, threshold: float = 0.5) -> dict:
    """``image_id,predicted`` where predicted is true/false or a score in [0, 1]."""
    return _read_column(text, "predicted", _parse_prediction(threshold))


def align_records(predictions: Mapping[str, bool], truth: Mapping[str, bool]) -> list:
    """``(predicted, truth)`` pairs in truth order; every id must appear in both."""
    for image_id in truth:
        if image_id not in predictions:
            raise IdMismatch(image_id, "predictions")
    for image_id in predictions:
        if image_id not in truth:
            raise IdMismatch(image_id, "truth")
    return [(predictions[i], truth[i]) for i in truth]
