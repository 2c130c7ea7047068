"""Stroke sequence encoder.

Each stroke is a coordinate sequence; two independent 3-layer GRU stacks
read it forward and reversed, and the stroke feature is the concatenation
of their final hidden states, one 2h vector per stroke.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import GruStack, Parameter, Value, concat, take_time
from ..autodiff.seeding import child_rng
from ..errors import EmptyStroke
from ..sketch import Stroke, VectorSketch


class SsemModel:
    """Bidirectional stroke encoder: feature dimension = 2 * hidden."""

    def __init__(self, hidden: int = 64, layers: int = 3,
                 rng: np.random.Generator | None = None,
                 normalize: bool = True):
        rng = rng if rng is not None else child_rng(0, "ssem", "init")
        self.hidden = hidden
        self.layers = layers
        self.normalize = normalize
        self.fwd = GruStack(2, hidden, layers, rng, "ssem.fwd")
        self.bwd = GruStack(2, hidden, layers, rng, "ssem.bwd")

    @property
    def feature_dim(self) -> int:
        return 2 * self.hidden

    @property
    def params(self) -> list[Parameter]:
        return self.fwd.params + self.bwd.params

    def _coords(self, stroke: Stroke, canvas: tuple[int, int]) -> np.ndarray:
        pts = stroke.points
        if self.normalize:
            return pts / np.array([canvas[0], canvas[1]], float)
        return np.asarray(pts, float)

    def encode_strokes(self, strokes: list[Stroke],
                       canvas: tuple[int, int] | list[tuple[int, int]]) -> Value:
        """Features for a stroke batch: (N, 2h).

        ``canvas`` is one (w, h) for the whole batch or one per stroke
        (mixed-sketch batches normalize each stroke by its own canvas).
        """
        if not strokes:
            raise EmptyStroke("encode_strokes: no strokes")
        if any(len(s) == 0 for s in strokes):
            raise EmptyStroke("encode_strokes: empty stroke in batch")
        canvases = canvas if isinstance(canvas, list) else [canvas] * len(strokes)
        lengths = np.array([len(s) for s in strokes], int)
        t_max, n = int(lengths.max()), len(strokes)
        x_f = np.zeros((t_max, n, 2))
        x_b = np.zeros((t_max, n, 2))
        for k, s in enumerate(strokes):
            c = self._coords(s, canvases[k])
            x_f[:len(s), k] = c
            x_b[:len(s), k] = c[::-1]
        h_f = take_time(self.fwd(Value(x_f), lengths), lengths - 1)
        h_b = take_time(self.bwd(Value(x_b), lengths), lengths - 1)
        return concat([h_f, h_b], axis=1)

    def encode_sketch(self, sketch: VectorSketch) -> Value:
        return self.encode_strokes(list(sketch.strokes), sketch.canvas)

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {p.name: p.data for p in self.params}

    def load_state(self, arrays: dict[str, np.ndarray]) -> None:
        for p in self.params:
            p.data = np.array(arrays[p.name], np.float64)


def ssem_forward(stroke: Stroke, model: SsemModel,
                 canvas: tuple[int, int] = (512, 512)) -> Value:
    """Feature vector (2h,) for a single stroke.

    The canvas is needed because coordinates are canvas-normalized before
    the recurrence (stand-alone strokes do not carry one).
    """
    if len(stroke) == 0:
        raise EmptyStroke("ssem_forward: empty stroke")
    feats = model.encode_strokes([stroke], canvas)
    return feats[0]
