"""Vector sketch data model.

A sketch is an ordered list of strokes on an integer canvas.  Stroke points
are float pixel coordinates with the origin at the top-left corner, x to the
right and y pointing down; a point (x, y) rasterizes into column round(x),
row round(y).  Strokes are value objects: their point arrays are frozen, and
every transform returns a new stroke.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple

import numpy as np

from .categories import N_CATEGORIES
from .errors import EmptyStroke, SketchParseError, UnknownCategory

MAX_STROKE_POINTS = 50  # segmentation cap used by split_stroke callers


class Point(NamedTuple):
    x: float
    y: float


def _freeze_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        pts = pts.reshape(0, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"stroke points must be (M, 2), got {pts.shape}")
    if pts.size and not np.all(np.isfinite(pts)):
        raise ValueError("stroke points must be finite")
    pts = pts.copy()
    pts.flags.writeable = False
    return pts


@dataclass(frozen=True)
class Stroke:
    """A polyline with a parent-curve id and an optional category label."""

    points: np.ndarray
    parent_id: int = 0
    label: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", _freeze_points(self.points))
        if self.label is not None and not 0 <= self.label < N_CATEGORIES:
            raise UnknownCategory(f"stroke label {self.label!r} not in 0..{N_CATEGORIES - 1}")

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class VectorSketch:
    """An ordered stroke list on a (width, height) canvas."""

    strokes: tuple[Stroke, ...]
    canvas: tuple[int, int] = (512, 512)

    def __post_init__(self):
        object.__setattr__(self, "strokes", tuple(self.strokes))
        w, h = self.canvas
        if not (isinstance(w, int) and isinstance(h, int) and w > 0 and h > 0):
            raise ValueError(f"canvas must be two positive ints, got {self.canvas!r}")
        object.__setattr__(self, "canvas", (w, h))

    def __len__(self) -> int:
        return len(self.strokes)

    @property
    def n_points(self) -> int:
        return sum(len(s) for s in self.strokes)


@dataclass(frozen=True)
class SemanticRaster:
    """A binary occupancy grid plus a per-pixel category channel.

    ``labels`` holds a category id where known and -1 where the pixel is
    set but unlabeled (or not set at all); labeled pixels are always set.
    """

    mask: np.ndarray   # (H, W) bool
    labels: np.ndarray  # (H, W) int16, -1 = empty

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        labels = np.asarray(self.labels, dtype=np.int16)
        if mask.shape != labels.shape or mask.ndim != 2:
            raise ValueError(f"mask/labels shapes differ: {mask.shape} vs {labels.shape}")
        if np.any((labels >= 0) & ~mask):
            raise ValueError("labeled pixels must be set in the mask")
        if labels.size and (labels.max(initial=-1) >= N_CATEGORIES):
            raise UnknownCategory("raster holds a label outside the category scheme")
        for a in (mask, labels):
            a.flags.writeable = False
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def empty(cls, width: int, height: int) -> "SemanticRaster":
        return cls(np.zeros((height, width), bool), np.full((height, width), -1, np.int16))

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]


def split_stroke(stroke: Stroke, max_points: int = MAX_STROKE_POINTS) -> list[Stroke]:
    """Greedily chunk a stroke into pieces of at most ``max_points`` points.

    Chunks preserve point order and keep the source stroke's parent_id and
    label; an empty stroke yields an empty list.
    """
    if max_points < 2:
        raise ValueError(f"max_points must be >= 2, got {max_points}")
    n = len(stroke)
    if n == 0:
        return []
    return [
        replace(stroke, points=stroke.points[i:i + max_points])
        for i in range(0, n, max_points)
    ]


def centroid(stroke: Stroke) -> Point:
    if len(stroke) == 0:
        raise EmptyStroke("centroid of an empty stroke")
    cx, cy = stroke.points.mean(axis=0)
    return Point(float(cx), float(cy))


def reverse(stroke: Stroke) -> Stroke:
    return replace(stroke, points=stroke.points[::-1])


def _bresenham(x0: int, y0: int, x1: int, y1: int) -> Iterable[tuple[int, int]]:
    """Integer line from (x0, y0) to (x1, y1), inclusive."""
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        yield x0, y0
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def rasterize(sketch: VectorSketch, size: tuple[int, int] | None = None) -> SemanticRaster:
    """Render a sketch to a semantic raster.

    Points are scaled from the sketch canvas to ``size`` (default: the canvas
    itself), rounded to pixels and joined with integer line segments.  Where
    strokes overlap, the later stroke's label wins.  Unlabeled strokes set
    the occupancy mask and leave the label channel empty.
    """
    w, h = size if size is not None else sketch.canvas
    if w < 1 or h < 1:
        raise ValueError(f"raster size must be positive, got {(w, h)}")
    cw, ch = sketch.canvas
    sx, sy = w / cw, h / ch
    mask = np.zeros((h, w), bool)
    labels = np.full((h, w), -1, np.int16)
    for stroke in sketch.strokes:
        if len(stroke) == 0:
            continue
        lab = -1 if stroke.label is None else stroke.label
        px = np.clip(np.rint(stroke.points[:, 0] * sx).astype(int), 0, w - 1)
        py = np.clip(np.rint(stroke.points[:, 1] * sy).astype(int), 0, h - 1)
        if len(stroke) == 1:
            mask[py[0], px[0]] = True
            labels[py[0], px[0]] = lab
            continue
        for i in range(len(stroke) - 1):
            for x, y in _bresenham(px[i], py[i], px[i + 1], py[i + 1]):
                mask[y, x] = True
                labels[y, x] = lab
    return SemanticRaster(mask, labels)


# ---------------------------------------------------------------------------
# JSON wire format


def serialize(sketch: VectorSketch) -> str:
    """Encode a sketch as the JSON interchange document."""
    doc = {
        "canvas": [sketch.canvas[0], sketch.canvas[1]],
        "strokes": [
            {
                "parent": s.parent_id,
                "label": s.label,
                "points": [[float(x), float(y)] for x, y in s.points],
            }
            for s in sketch.strokes
        ],
    }
    return json.dumps(doc, separators=(",", ":"))


def _expect_keys(obj: dict, required: set[str], where: str) -> None:
    missing = required - obj.keys()
    extra = obj.keys() - required
    if missing:
        raise SketchParseError(f"{where}: missing field(s) {sorted(missing)}")
    if extra:
        raise SketchParseError(f"{where}: unknown field(s) {sorted(extra)}")


def parse(text: str) -> VectorSketch:
    """Decode and validate a sketch document.

    Raises SketchParseError with a field path for structural problems and
    UnknownCategory for out-of-range labels.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SketchParseError(f"invalid JSON at line {e.lineno} col {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise SketchParseError("document root must be an object")
    _expect_keys(doc, {"canvas", "strokes"}, "document")

    canvas = doc["canvas"]
    if (not isinstance(canvas, list) or len(canvas) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in canvas)):
        raise SketchParseError("canvas: expected [width, height] positive ints")
    w, h = canvas

    if not isinstance(doc["strokes"], list):
        raise SketchParseError("strokes: expected a list")
    strokes = []
    for i, s in enumerate(doc["strokes"]):
        where = f"strokes[{i}]"
        if not isinstance(s, dict):
            raise SketchParseError(f"{where}: expected an object")
        _expect_keys(s, {"parent", "label", "points"}, where)
        parent = s["parent"]
        if not isinstance(parent, int) or isinstance(parent, bool):
            raise SketchParseError(f"{where}.parent: expected an int")
        label = s["label"]
        if label is not None and (not isinstance(label, int) or isinstance(label, bool)):
            raise SketchParseError(f"{where}.label: expected an int or null")
        if label is not None and not 0 <= label < N_CATEGORIES:
            raise UnknownCategory(f"{where}.label: {label} not in 0..{N_CATEGORIES - 1}")
        pts = s["points"]
        if not isinstance(pts, list) or len(pts) == 0:
            raise SketchParseError(f"{where}.points: expected a non-empty list")
        for j, p in enumerate(pts):
            if (not isinstance(p, list) or len(p) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)):
                raise SketchParseError(f"{where}.points[{j}]: expected [x, y] numbers")
            x, y = float(p[0]), float(p[1])
            if not (math.isfinite(x) and math.isfinite(y)):
                raise SketchParseError(f"{where}.points[{j}]: coordinates must be finite")
            if not (0 <= x < w and 0 <= y < h):
                raise SketchParseError(
                    f"{where}.points[{j}]: ({x}, {y}) outside canvas {w}x{h}")
        strokes.append(Stroke(np.array(pts, np.float64), parent_id=parent, label=label))
    return VectorSketch(tuple(strokes), (w, h))
