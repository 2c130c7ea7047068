"""Evaluation metrics: pixel accuracy, chamfer distance, model reports."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..embed.encoders import EmbedModel
from ..embed.raster import render_sketch_raster
from ..embed.segnet import SegFeatureNet
from ..embed.train import reconstruct
from ..errors import EmptyRegion, ShapeError
from ..pipeline import extract_edges
from ..sketch import VectorSketch, rasterize
from ..ssi.infer import label_sketch
from ..ssi.ssem import SsemModel
from ..ssi.stem import StemModel
from .dataset import ToyItem, box_downsample, segmap_downsample


@dataclass(frozen=True)
class MetricReport:
    """Headline metrics plus a per-category accuracy table."""

    p_acc: float
    chamfer: float
    per_category: dict[int, float] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.p_acc <= 1.0:
            raise ValueError(f"p_acc must be a fraction, got {self.p_acc}")
        if self.chamfer < 0.0:
            raise ValueError(f"chamfer must be nonnegative, got {self.chamfer}")


def p_acc(pred: np.ndarray, gt: np.ndarray,
          region: np.ndarray | None = None) -> float:
    """Fraction of matching cells, optionally restricted to a region mask."""
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise ShapeError(f"prediction {pred.shape} and ground truth {gt.shape} differ")
    if region is None:
        region = np.ones(pred.shape, bool)
    elif region.shape != pred.shape:
        raise ShapeError(f"region {region.shape} does not match maps {pred.shape}")
    n = int(region.sum())
    if n == 0:
        raise EmptyRegion("no cells to evaluate")
    return float((pred[region] == gt[region]).sum() / n)


def chamfer(a: np.ndarray, b: np.ndarray, canvas_width: float) -> float:
    """Symmetric mean nearest-neighbor distance, normalized by canvas width.

    The two directed means are averaged, so chamfer(a, b) == chamfer(b, a)
    and a single pair at distance d gives d / width.
    """
    a = np.atleast_2d(np.asarray(a, np.float64))
    b = np.atleast_2d(np.asarray(b, np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("chamfer distance needs two non-empty point sets")
    if a.shape[1] != 2 or b.shape[1] != 2:
        raise ShapeError(f"point sets must be (n, 2), got {a.shape} and {b.shape}")
    if canvas_width <= 0:
        raise ValueError(f"canvas width must be positive, got {canvas_width}")
    d_ab = cKDTree(b).query(a)[0].mean()
    d_ba = cKDTree(a).query(b)[0].mean()
    return float((d_ab + d_ba) / 2.0 / canvas_width)


def _mask_points(mask: np.ndarray) -> np.ndarray:
    ys, xs = np.nonzero(mask)
    return np.column_stack([xs, ys]).astype(np.float64)


def eval_ssi(sketches: list[VectorSketch], ssem: SsemModel, stem: StemModel,
             k_nn: int = 5, vote: bool = True) -> MetricReport:
    """Point-count-weighted stroke accuracy against GT labels."""
    if not sketches:
        raise ValueError("nothing to evaluate")
    correct = 0
    total = 0
    per_cat_hit: dict[int, int] = {}
    per_cat_n: dict[int, int] = {}
    n_strokes = 0
    for sk in sketches:
        labeled, _ = label_sketch(sk, ssem, stem, k_nn, vote=vote)
        for gt_stroke, pred_stroke in zip(sk.strokes, labeled.strokes):
            if gt_stroke.label is None:
                continue
            w = len(gt_stroke)
            hit = int(pred_stroke.label == gt_stroke.label)
            correct += hit * w
            total += w
            per_cat_hit[gt_stroke.label] = per_cat_hit.get(gt_stroke.label, 0) + hit * w
            per_cat_n[gt_stroke.label] = per_cat_n.get(gt_stroke.label, 0) + w
            n_strokes += 1
    if total == 0:
        raise EmptyRegion("no labeled strokes to evaluate")
    table = {c: per_cat_hit.get(c, 0) / n for c, n in sorted(per_cat_n.items())}
    return MetricReport(
        p_acc=correct / total, chamfer=0.0, per_category=table,
        counts={"sketches": len(sketches), "strokes": n_strokes, "points": total})


def eval_embed(model: EmbedModel, segnet: SegFeatureNet,
               items: list[ToyItem] | tuple[ToyItem, ...]) -> MetricReport:
    """Reconstruction quality: P_Acc via the frozen segnet, plus chamfer
    between each input sketch and edges re-extracted from its output."""
    if not items:
        raise ValueError("nothing to evaluate")
    res = model.resolution
    accs = []
    chams = []
    per_cat_hit: dict[int, int] = {}
    per_cat_n: dict[int, int] = {}
    for it in items:
        factor = it.image.shape[-1] // res
        raster = render_sketch_raster(it.sketch, res)
        face = box_downsample(it.image, factor)
        gen = reconstruct(model, raster, face=face)  # (R, R, 3)
        pred = segnet.predict(gen.transpose(2, 0, 1))
        gt = segmap_downsample(it.segmap, factor)
        accs.append(p_acc(pred, gt))
        for c in np.unique(gt):
            sel = gt == c
            per_cat_hit[int(c)] = per_cat_hit.get(int(c), 0) + int((pred[sel] == c).sum())
            per_cat_n[int(c)] = per_cat_n.get(int(c), 0) + int(sel.sum())
        sketch_pts = _mask_points(rasterize(it.sketch, (res, res)).mask)
        edge_pts = _mask_points(extract_edges(gen).mask)
        if len(sketch_pts) and len(edge_pts):
            chams.append(chamfer(sketch_pts, edge_pts, res))
    table = {c: per_cat_hit[c] / n for c, n in sorted(per_cat_n.items())}
    return MetricReport(
        p_acc=float(np.mean(accs)),
        chamfer=float(np.mean(chams)) if chams else 0.0,
        per_category=table,
        counts={"items": len(items), "chamfer_items": len(chams)})
