"""Sketch-to-tensor rendering for the encoders.

A labeled sketch becomes a 23-channel raster: one one-hot channel per
category (0..21) plus a binary any-stroke channel, so label identity is
explicit to the convolutions.
"""

from __future__ import annotations

import numpy as np

from ..categories import N_CATEGORIES
from ..sketch import VectorSketch, rasterize

N_RASTER_CHANNELS = N_CATEGORIES + 1


def render_sketch_raster(sketch: VectorSketch, resolution: int) -> np.ndarray:
    """(23, resolution, resolution) float64 raster of a sketch."""
    sem = rasterize(sketch, (resolution, resolution))
    out = np.zeros((N_RASTER_CHANNELS, resolution, resolution))
    for c in range(N_CATEGORIES):
        out[c] = sem.labels == c
    out[N_CATEGORIES] = sem.mask
    return out
