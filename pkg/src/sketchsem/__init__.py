"""Semantic sketch labeling and sketch-conditioned toy face generation."""

from .categories import CATEGORIES, DEFAULT_SCHEME, N_CATEGORIES, Category, CategoryScheme
from .sketch import (
    MAX_STROKE_POINTS,
    Point,
    SemanticRaster,
    Stroke,
    VectorSketch,
    centroid,
    parse,
    rasterize,
    reverse,
    serialize,
    split_stroke,
)

__all__ = [
    "CATEGORIES",
    "DEFAULT_SCHEME",
    "N_CATEGORIES",
    "Category",
    "CategoryScheme",
    "MAX_STROKE_POINTS",
    "Point",
    "SemanticRaster",
    "Stroke",
    "VectorSketch",
    "centroid",
    "parse",
    "rasterize",
    "reverse",
    "serialize",
    "split_stroke",
]

__version__ = "0.1.0"
