"""Style-code bundle: fusion and interpolation.

An 18-row code drives the generator; rows 1-8 come from the sketch (coarse
semantics), rows 9-18 from the appearance source, and every row rides on a
shared average code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff import Value, as_value, concat
from ..errors import ShapeError

N_STYLE_ROWS = 18
N_SKETCH_ROWS = 8
N_APPEAR_ROWS = 10


@dataclass
class StyleCodes:
    """One face worth of latent codes, each a Value of width ``dim``."""

    w_c: Value     # (1, D) shared sketch code
    w_fs: Value    # (8, D) per-row sketch codes
    w_ff: Value    # (10, D) per-row appearance codes
    w_bar: Value   # (1, D) average code

    def __post_init__(self):
        d = self.w_c.shape[-1]
        want = {"w_c": (1, d), "w_fs": (N_SKETCH_ROWS, d),
                "w_ff": (N_APPEAR_ROWS, d), "w_bar": (1, d)}
        for name, shape in want.items():
            got = getattr(self, name).shape
            if got != shape:
                raise ShapeError(f"StyleCodes.{name}: expected {shape}, got {got}")

    @property
    def dim(self) -> int:
        return self.w_c.shape[-1]


def fuse_codes(codes: StyleCodes) -> Value:
    """w = w_bar + w_c (both broadcast over rows) + [w_fs; w_ff], shape (18, D)."""
    rows = concat([codes.w_fs, codes.w_ff], axis=0)
    return rows + codes.w_c + codes.w_bar


def fuse_rows(w_c: Value, w_fs: Value, w_ff: Value, w_bar: Value) -> Value:
    """Batched fusion: (N,1,D) + (N,8,D) + (N,10,D) + (1,D) -> (N,18,D)."""
    rows = concat([w_fs, w_ff], axis=1)
    return rows + w_c + w_bar


def interpolate(w1: np.ndarray, w2: np.ndarray, t: float) -> np.ndarray:
    """Linear blend of two fused codes; t must lie in [0, 1]."""
    w1 = np.asarray(as_value(w1).data, float)
    w2 = np.asarray(as_value(w2).data, float)
    if w1.shape != w2.shape:
        raise ShapeError(f"interpolate: {w1.shape} vs {w2.shape}")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"interpolation parameter must be in [0, 1], got {t}")
    return (1.0 - t) * w1 + t * w2
