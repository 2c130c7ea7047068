"""Fixed random perceptual pyramid.

Random convolutional features are a serviceable perceptual proxy: distances
in their space respond to structure rather than raw pixels.  The weights
come from one fixed seed, independent of any run configuration, and are
never trained.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import Value, avg_pool2d, conv2d, relu
from ..autodiff.seeding import child_rng


class PerceptualNet:
    """Three relu conv stages with frozen seeded weights."""

    WIDTHS = (8, 12, 16)

    def __init__(self):
        rng = child_rng(0, "embed", "perceptual")
        self.kernels: list[np.ndarray] = []
        prev = 3
        for c in self.WIDTHS:
            s = np.sqrt(6.0 / (prev * 9))
            self.kernels.append(rng.uniform(-s, s, (c, prev, 3, 3)))
            prev = c

    def features(self, x: Value) -> list[Value]:
        out = []
        for i, k in enumerate(self.kernels):
            if i > 0:
                x = avg_pool2d(x)
            x = relu(conv2d(x, Value(k), padding=1))
            out.append(x)
        return out
