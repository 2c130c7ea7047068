"""Stroke labeling inference and voting post-processing."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..sketch import VectorSketch
from .graph import build_graph
from .ssem import SsemModel
from .stem import StemModel


def classify(sketch: VectorSketch, ssem: SsemModel, stem: StemModel,
             k_nn: int = 5) -> list[tuple[int, float]]:
    """(label, softmax confidence) per stroke; empty sketch -> empty list.

    Ties in the logits resolve to the smallest class id.
    """
    if len(sketch) == 0:
        return []
    feats = ssem.encode_sketch(sketch)
    graph = build_graph(sketch, feats, k_nn, stem.edge_mlp)
    logits = stem.logits(graph, feats).data
    z = logits - logits.max(axis=1, keepdims=True)
    soft = np.exp(z)
    soft /= soft.sum(axis=1, keepdims=True)
    labels = np.argmax(logits, axis=1)  # argmax returns the first (smallest) max
    return [(int(l), float(soft[i, l])) for i, l in enumerate(labels)]


def vote_postprocess(labels, parents, point_counts) -> np.ndarray:
    """Relabel every segment with its parent stroke's majority label.

    The majority is weighted by segment point count; ties pick the smaller
    class id.  Idempotent.
    """
    labels = np.asarray(labels, int)
    parents = np.asarray(parents, int)
    counts = np.asarray(point_counts, int)
    if not (labels.shape == parents.shape == counts.shape):
        raise ValueError("labels, parents and point_counts must align")
    out = labels.copy()
    for pid in np.unique(parents):
        sel = parents == pid
        score: dict[int, int] = {}
        for lab, cnt in zip(labels[sel], counts[sel]):
            score[int(lab)] = score.get(int(lab), 0) + int(cnt)
        best = min(score.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        out[sel] = best
    return out


def label_sketch(sketch: VectorSketch, ssem: SsemModel, stem: StemModel,
                 k_nn: int = 5, vote: bool = True) -> tuple[VectorSketch, list[float]]:
    """Predict labels for every stroke; returns the labeled sketch + confidences."""
    preds = classify(sketch, ssem, stem, k_nn)
    if not preds:
        return sketch, []
    labels = np.array([p[0] for p in preds])
    confs = [p[1] for p in preds]
    if vote:
        parents = [s.parent_id for s in sketch.strokes]
        counts = [len(s) for s in sketch.strokes]
        labels = vote_postprocess(labels, parents, counts)
    strokes = tuple(replace(s, label=int(lab))
                    for s, lab in zip(sketch.strokes, labels))
    return VectorSketch(strokes, sketch.canvas), confs
