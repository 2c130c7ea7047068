"""Stroke labeling: bidirectional stroke encoder + graph classifier."""

from .graph import (
    StrokeGraph,
    angle,
    build_graph,
    edge_features,
    knn_edges,
    merge_graphs,
    normalized_adjacency,
)
from .infer import classify, label_sketch, vote_postprocess
from .ssem import SsemModel, ssem_forward
from .stem import Linear, Mlp, StemModel, TagConvLayer, tagconv_forward
from .train import (
    SsiConfig,
    augmented_items,
    load_ssi,
    save_ssi,
    stroke_accuracy,
    train_ssi,
)

__all__ = [
    "StrokeGraph",
    "angle",
    "build_graph",
    "edge_features",
    "knn_edges",
    "merge_graphs",
    "normalized_adjacency",
    "classify",
    "label_sketch",
    "vote_postprocess",
    "SsemModel",
    "ssem_forward",
    "Linear",
    "Mlp",
    "StemModel",
    "TagConvLayer",
    "tagconv_forward",
    "SsiConfig",
    "augmented_items",
    "load_ssi",
    "save_ssi",
    "stroke_accuracy",
    "train_ssi",
]
