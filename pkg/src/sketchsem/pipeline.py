"""Raster-to-sketch synthesis pipeline.

Turns a source-labeled segmentation map (plus an optional edge map) into a
labeled vector sketch: contour extraction with boundary-pair categories,
map merging with label transfer, skeletonization, deterministic chain
tracing, and top-k stroke simplification.  All steps are pure functions of
their inputs; tracing order and tie-breaks are fixed so the same raster
always yields the same sketch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .categories import (
    BOUNDARY_PAIRS,
    N_SOURCE_LABELS,
    SOURCE_TO_CATEGORY,
    SRC_SKIN,
)
from .errors import UnknownCategory
from .sketch import (
    MAX_STROKE_POINTS,
    SemanticRaster,
    Stroke,
    VectorSketch,
    split_stroke,
)


@dataclass(frozen=True)
class SegMap:
    """A source-labeled segmentation grid (values 0..18)."""

    grid: np.ndarray  # (H, W) integer

    def __post_init__(self):
        g = np.asarray(self.grid)
        if g.ndim != 2 or not np.issubdtype(g.dtype, np.integer):
            raise ValueError(f"segmentation grid must be a 2-d integer array, got {g.dtype} {g.shape}")
        if g.size and (g.min() < 0 or g.max() >= N_SOURCE_LABELS):
            raise UnknownCategory(
                f"segmentation grid holds labels outside 0..{N_SOURCE_LABELS - 1}")
        g = np.ascontiguousarray(g, dtype=np.int16)
        g.flags.writeable = False
        object.__setattr__(self, "grid", g)

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape


def remap_labels(src_grid: np.ndarray) -> np.ndarray:
    """Map a grid of source labels to category ids (-1 for background)."""
    table = np.full(N_SOURCE_LABELS, -1, np.int16)
    for src, cat in SOURCE_TO_CATEGORY.items():
        if cat is not None:
            table[src] = cat
    g = np.asarray(src_grid)
    if g.size and (g.min() < 0 or g.max() >= N_SOURCE_LABELS):
        raise UnknownCategory(f"source labels outside 0..{N_SOURCE_LABELS - 1}")
    return table[g]


# Neighbor scan order used when a contour pixel touches several regions:
# north, south, west, east.
_DIRS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def _shift(grid: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Per-pixel neighbor value at offset (dy, dx), edges replicated."""
    p = np.pad(grid, 1, mode="edge")
    h, w = grid.shape
    return p[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]


def _pair_table() -> np.ndarray:
    t = np.full((N_SOURCE_LABELS, N_SOURCE_LABELS), -1, np.int16)
    for pair, cat in BOUNDARY_PAIRS.items():
        a, b = tuple(pair)
        t[a, b] = t[b, a] = cat
    return t


def _resolve_table() -> np.ndarray:
    """Label for a contour pixel of source label ``own`` next to ``nb``.

    Boundary pairs are handled separately; here skin defers to the facial
    part beside it, everything else keeps its own (remapped) label, and
    background pixels are dropped.
    """
    t = np.full((N_SOURCE_LABELS, N_SOURCE_LABELS), -1, np.int16)
    remap = np.full(N_SOURCE_LABELS, -1, np.int16)
    for src, cat in SOURCE_TO_CATEGORY.items():
        remap[src] = -1 if cat is None else cat
    for own in range(N_SOURCE_LABELS):
        for nb in range(N_SOURCE_LABELS):
            if remap[own] < 0:
                continue  # background side of a boundary is not drawn
            if remap[nb] < 0:
                t[own, nb] = remap[own]
            elif own == SRC_SKIN:
                t[own, nb] = remap[nb]
            else:
                t[own, nb] = remap[own]
    return t


_PAIR_T = _pair_table()
_RESOLVE_T = _resolve_table()


def extract_contour(seg: SegMap) -> SemanticRaster:
    """Region-boundary pixels of a segmentation map, as a labeled raster.

    A pixel is on the contour when some 4-neighbor has a different source
    label.  Its category comes from the first neighbor (scanning N, S, W, E)
    that forms a boundary-pair with it; otherwise from the first differing
    neighbor under the rules of ``_resolve_table``.
    """
    g = seg.grid
    res = np.full(g.shape, -2, np.int16)
    contour = np.zeros(g.shape, bool)
    # Write plain resolutions in reverse priority so the north neighbor,
    # written last, wins; then overwrite with pair resolutions the same way.
    for dy, dx in reversed(_DIRS):
        nb = _shift(g, dy, dx)
        differs = nb != g
        contour |= differs
        res[differs] = _RESOLVE_T[g, nb][differs]
    for dy, dx in reversed(_DIRS):
        nb = _shift(g, dy, dx)
        sel = (nb != g) & (_PAIR_T[g, nb] >= 0)
        res[sel] = _PAIR_T[g, nb][sel]
    mask = contour & (res >= 0)
    labels = np.where(mask, res, np.int16(-1)).astype(np.int16)
    return SemanticRaster(mask, labels)


# ---------------------------------------------------------------------------
# Thinning


def _transitions(p: list[np.ndarray]) -> np.ndarray:
    """0->1 transition count around the 8-neighborhood ring."""
    a = np.zeros(p[0].shape, np.uint8)
    for i in range(8):
        a += (p[i] == 0) & (p[(i + 1) % 8] == 1)
    return a


def _ring(m: np.ndarray) -> list[np.ndarray]:
    """Neighbors P2..P9 (N, NE, E, SE, S, SW, W, NW) with zero padding."""
    z = np.pad(m.astype(np.uint8), 1)
    h, w = m.shape
    off = {"N": (0, 1), "NE": (0, 2), "E": (1, 2), "SE": (2, 2),
           "S": (2, 1), "SW": (2, 0), "W": (1, 0), "NW": (0, 0)}
    return [z[dy:dy + h, dx:dx + w] for dy, dx in
            (off[k] for k in ("N", "NE", "E", "SE", "S", "SW", "W", "NW"))]


def _zhang_suen(mask: np.ndarray) -> np.ndarray:
    m = mask.copy()
    while True:
        changed = False
        for sub in (0, 1):
            p = _ring(m)
            b = sum(x.astype(np.uint8) for x in p)
            a = _transitions(p)
            n, e, s, w = p[0], p[2], p[4], p[6]
            if sub == 0:
                cond = (n * e * s == 0) & (e * s * w == 0)
            else:
                cond = (n * e * w == 0) & (n * s * w == 0)
            kill = m & (b >= 2) & (b <= 6) & (a == 1) & cond
            if kill.any():
                m &= ~kill
                changed = True
        if not changed:
            return m


def _pixel_transitions(m: np.ndarray, y: int, x: int) -> int:
    """0->1 transitions around one pixel's 8-neighborhood ring."""
    h, w = m.shape

    def at(dy: int, dx: int) -> int:
        ny, nx = y + dy, x + dx
        return int(m[ny, nx]) if 0 <= ny < h and 0 <= nx < w else 0

    ring = [at(-1, 0), at(-1, 1), at(0, 1), at(1, 1),
            at(1, 0), at(1, -1), at(0, -1), at(-1, -1)]
    return sum(ring[i] == 0 and ring[(i + 1) % 8] == 1 for i in range(8))


def _break_blocks(mask: np.ndarray) -> np.ndarray:
    """Remove one pixel from every remaining 2x2 block, deterministically."""
    m = mask.copy()
    while True:
        blocks = m[:-1, :-1] & m[1:, :-1] & m[:-1, 1:] & m[1:, 1:]
        ys, xs = np.nonzero(blocks)
        if len(ys) == 0:
            return m
        y, x = int(ys[0]), int(xs[0])
        corners = [(y, x), (y, x + 1), (y + 1, x), (y + 1, x + 1)]
        # Prefer a corner whose removal cannot split the skeleton: a simple
        # boundary pixel with exactly one neighborhood transition.
        pick = corners[0]
        for cy, cx in corners:
            if _pixel_transitions(m, cy, cx) == 1:
                pick = (cy, cx)
                break
        m[pick] = False


def thin(raster: SemanticRaster) -> SemanticRaster:
    """Skeletonize the occupancy mask to single-pixel width.

    Classic two-subpass thinning run to a fixpoint, followed by a
    deterministic cleanup that breaks any 2x2 block the main pass left
    behind.  Surviving pixels keep their labels.
    """
    m = _break_blocks(_zhang_suen(raster.mask))
    labels = np.where(m, raster.labels, np.int16(-1)).astype(np.int16)
    return SemanticRaster(m, labels)


def merge_maps(contour: SemanticRaster, edges: SemanticRaster,
               radius: int | None = None) -> SemanticRaster:
    """Union a contour raster with an edge map, then thin.

    Edge pixels within ``radius`` of the contour inherit the nearest contour
    pixel's label; farther edge pixels keep their own label channel (usually
    empty).  The default radius is 2 px at a 512-wide canvas, scaled
    proportionally and floored at 1.
    """
    if contour.mask.shape != edges.mask.shape:
        raise ValueError(
            f"contour {contour.mask.shape} and edges {edges.mask.shape} differ in size")
    r = radius if radius is not None else max(1, round(2 * contour.width / 512))
    labels = np.where(contour.mask, contour.labels, np.int16(-1))
    edge_only = edges.mask & ~contour.mask
    if contour.mask.any():
        dist, (iy, ix) = ndimage.distance_transform_edt(
            ~contour.mask, return_indices=True)
        near = edge_only & (dist <= r)
        labels[near] = contour.labels[iy[near], ix[near]]
        far = edge_only & ~near
    else:
        far = edge_only
    labels[far] = edges.labels[far]
    return thin(SemanticRaster(contour.mask | edges.mask, labels))


# ---------------------------------------------------------------------------
# Tracing

# 4-adjacent steps first, then diagonals; fixed order makes tracing
# deterministic.
_TRACE_STEPS = ((-1, 0), (0, -1), (0, 1), (1, 0), (-1, -1), (-1, 1), (1, -1), (1, 1))


def _trace_group(mask: np.ndarray, out: list[list[tuple[int, int]]]) -> None:
    h, w = mask.shape
    deg = np.zeros(mask.shape, np.uint8)
    for dy, dx in _TRACE_STEPS:
        deg += _shift_bool(mask, dy, dx)
    deg[~mask] = 0
    visited = np.zeros(mask.shape, bool)

    def walk(y: int, x: int) -> list[tuple[int, int]]:
        chain = [(y, x)]
        visited[y, x] = True
        while True:
            for dy, dx in _TRACE_STEPS:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not visited[ny, nx]:
                    visited[ny, nx] = True
                    chain.append((ny, nx))
                    y, x = ny, nx
                    break
            else:
                return chain

    ys, xs = np.nonzero(mask & (deg <= 1))
    for y, x in zip(ys, xs):
        if not visited[y, x]:
            out.append(walk(int(y), int(x)))
    ys, xs = np.nonzero(mask)
    for y, x in zip(ys, xs):
        if not visited[y, x]:
            out.append(walk(int(y), int(x)))


def _shift_bool(mask: np.ndarray, dy: int, dx: int) -> np.ndarray:
    out = np.zeros(mask.shape, np.uint8)
    h, w = mask.shape
    ys = slice(max(dy, 0), h + min(dy, 0))
    xs = slice(max(dx, 0), w + min(dx, 0))
    ys_src = slice(max(-dy, 0), h + min(-dy, 0))
    xs_src = slice(max(-dx, 0), w + min(-dx, 0))
    out[ys, xs] = mask[ys_src, xs_src]
    return out


def vectorize(raster: SemanticRaster, max_points: int = MAX_STROKE_POINTS) -> VectorSketch:
    """Trace a raster into strokes, one label group at a time.

    Chains start at endpoints (pixels with at most one 8-neighbor in their
    group) in scan order, then any leftover loop pixels; every set pixel
    lands in exactly one chain and consecutive chain points are 8-adjacent,
    so rasterizing the result reproduces the input pixels exactly.  Chains
    longer than ``max_points`` are split; all pieces share a parent id.
    """
    h, w = raster.mask.shape
    groups: list[tuple[int | None, np.ndarray]] = []
    for lab in np.unique(raster.labels[raster.labels >= 0]):
        groups.append((int(lab), raster.labels == lab))
    unlabeled = raster.mask & (raster.labels < 0)
    if unlabeled.any():
        groups.append((None, unlabeled))

    strokes: list[Stroke] = []
    parent = 0
    for lab, mask in groups:
        chains: list[list[tuple[int, int]]] = []
        _trace_group(mask, chains)
        for chain in chains:
            pts = np.array([(x, y) for y, x in chain], np.float64)
            whole = Stroke(pts, parent_id=parent, label=lab)
            strokes.extend(split_stroke(whole, max_points))
            parent += 1
    return VectorSketch(tuple(strokes), canvas=(w, h))


def simplify(sketch: VectorSketch, top_k: int) -> VectorSketch:
    """Keep only the ``top_k`` longest parent curves per category.

    Parent length is the total point count over its strokes; ties rank the
    smaller parent id first.  Stroke order is preserved.
    """
    if top_k < 0:
        raise ValueError(f"top_k must be >= 0, got {top_k}")
    weights: dict[tuple[int | None, int], int] = {}
    for s in sketch.strokes:
        key = (s.label, s.parent_id)
        weights[key] = weights.get(key, 0) + len(s)
    keep: set[tuple[int | None, int]] = set()
    by_cat: dict[int | None, list[tuple[int, int]]] = {}
    for (lab, pid), n in weights.items():
        by_cat.setdefault(lab, []).append((n, pid))
    for lab, entries in by_cat.items():
        entries.sort(key=lambda e: (-e[0], e[1]))
        keep.update((lab, pid) for _, pid in entries[:top_k])
    return VectorSketch(
        tuple(s for s in sketch.strokes if (s.label, s.parent_id) in keep),
        canvas=sketch.canvas)


# ---------------------------------------------------------------------------
# Edge extraction


def extract_edges(image: np.ndarray, low: float = 0.10, high: float = 0.25) -> SemanticRaster:
    """Binary edge map via Sobel gradients with hysteresis thresholding.

    ``image`` is (H, W) grayscale or (3, H, W)/(H, W, 3) RGB in [0, 1].
    Thresholds are fractions of the maximum gradient magnitude: weak pixels
    survive only in 8-connected components that touch a strong pixel.
    """
    img = np.asarray(image, np.float64)
    if img.ndim == 3:
        if img.shape[0] == 3:
            img = np.moveaxis(img, 0, -1)
        img = img @ np.array([0.299, 0.587, 0.114])
    if img.ndim != 2:
        raise ValueError(f"expected a grayscale or RGB image, got shape {image.shape}")
    if not 0.0 <= low <= high:
        raise ValueError(f"thresholds must satisfy 0 <= low <= high, got {low}, {high}")
    gx = ndimage.sobel(img, axis=1, mode="nearest")
    gy = ndimage.sobel(img, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    top = mag.max()
    empty = SemanticRaster.empty(img.shape[1], img.shape[0])
    if top == 0.0:
        return empty
    weak = mag >= low * top
    strong = mag >= high * top
    comp, _ = ndimage.label(weak, structure=np.ones((3, 3), int))
    ids = np.unique(comp[strong])
    ids = ids[ids > 0]
    mask = np.isin(comp, ids)
    return SemanticRaster(mask, np.full(mask.shape, -1, np.int16))
