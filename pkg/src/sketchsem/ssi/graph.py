"""Stroke graph construction.

Vertices are strokes; each vertex points at its k nearest neighbors by
centroid distance (ties broken by stroke index).  Edge weights come from a
small MLP over the source centroid, the centroid distance and the relative
angle, so affinity is learned rather than fixed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..autodiff import Value, concat, inv_sqrt_guard, mul, reshape, scatter_matrix, vsum
from ..errors import CoincidentCentroids, EmptyStroke
from ..sketch import Point, VectorSketch, centroid


def angle(q_i: Point, q_j: Point) -> float:
    """Quadrant-aware angle of the displacement q_i -> q_j, radians.

    Coincident centroids have no defined direction; returns 0 with a
    CoincidentCentroids warning.
    """
    dx, dy = q_j[0] - q_i[0], q_j[1] - q_i[1]
    if dx == 0.0 and dy == 0.0:
        warnings.warn("coincident centroids, angle defaults to 0", CoincidentCentroids)
        return 0.0
    return math.atan2(dy, dx)


def knn_edges(centroids: np.ndarray, k_nn: int) -> np.ndarray:
    """Directed edge list (E, 2): i -> each of its min(k_nn, N-1) nearest."""
    n = len(centroids)
    if n <= 1 or k_nn <= 0:
        return np.zeros((0, 2), int)
    diff = centroids[:, None, :] - centroids[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    edges = []
    for i in range(n):
        order = sorted((dist[i, j], j) for j in range(n) if j != i)
        for _, j in order[:min(k_nn, n - 1)]:
            edges.append((i, j))
    return np.array(edges, int)


@dataclass
class StrokeGraph:
    """Directed stroke-affinity graph over one sketch (or a batch block)."""

    n: int
    edges: np.ndarray       # (E, 2) int, rows (i, j) meaning i -> j
    weights: Value          # (E,) nonnegative edge weights
    k_nn: int
    centroids: np.ndarray   # (N, 2) raw canvas coordinates

    def __post_init__(self):
        if self.edges.size and not np.all(np.isfinite(self.weights.data)):
            raise ValueError("edge weights must be finite")


def edge_features(centroids: np.ndarray, edges: np.ndarray,
                  canvas: tuple[int, int]) -> np.ndarray:
    """Per-edge (q_i, d, theta) with canvas-normalized positions/distances."""
    if len(edges) == 0:
        return np.zeros((0, 4))
    scale = np.array([canvas[0], canvas[1]], float)
    q = centroids / scale
    src, dst = edges[:, 0], edges[:, 1]
    d = np.hypot(*(q[dst] - q[src]).T)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CoincidentCentroids)
        theta = np.array([angle(Point(*centroids[i]), Point(*centroids[j]))
                          for i, j in edges])
    return np.column_stack([q[src], d, theta])


def build_graph(sketch: VectorSketch, features, k_nn: int, mlp) -> StrokeGraph:
    """Stroke graph for a sketch, edge weights from ``mlp`` over (q_i, d, theta).

    ``features`` (the v_i list) is accepted for interface symmetry but the
    edges depend only on centroids; pass None when convenient.
    """
    if len(sketch) == 0:
        raise EmptyStroke("build_graph: sketch has no strokes")
    cents = np.array([centroid(s) for s in sketch.strokes], float)
    edges = knn_edges(cents, k_nn)
    feats = edge_features(cents, edges, sketch.canvas)
    if len(edges) == 0:
        weights = Value(np.zeros(0))
    else:
        weights = reshape(mlp(Value(feats)), (len(edges),))
    return StrokeGraph(n=len(sketch), edges=edges, weights=weights,
                       k_nn=k_nn, centroids=cents)


def merge_graphs(graphs: list[StrokeGraph]) -> StrokeGraph:
    """Block-diagonal union of per-sketch graphs (for batched training)."""
    n = sum(g.n for g in graphs)
    parts, offset = [], 0
    weight_vals = []
    for g in graphs:
        if len(g.edges):
            parts.append(g.edges + offset)
            weight_vals.append(g.weights)
        offset += g.n
    edges = np.concatenate(parts) if parts else np.zeros((0, 2), int)
    weights = concat(weight_vals, axis=0) if weight_vals else Value(np.zeros(0))
    return StrokeGraph(n=n, edges=edges, weights=weights,
                       k_nn=max(g.k_nn for g in graphs), centroids=np.zeros((n, 2)))


def normalized_adjacency(graph: StrokeGraph) -> Value:
    """Dense degree-normalized adjacency D^(-1/2) W D^(-1/2), (n, n).

    Degree is the row (out-edge) weight sum; zero-degree vertices get an
    all-zero row and column, leaving only the hop-0 term downstream.
    """
    n = graph.n
    if len(graph.edges) == 0:
        return Value(np.zeros((n, n)))
    w = scatter_matrix(graph.weights, graph.edges[:, 0], graph.edges[:, 1], n)
    dinv = inv_sqrt_guard(vsum(w, axis=1))
    return mul(mul(w, reshape(dinv, (n, 1))), reshape(dinv, (1, n)))
