"""Small convolutional building blocks shared by the embed networks."""

from __future__ import annotations

import numpy as np

from ..autodiff import Parameter, Value, conv2d


class Conv:
    """3x3 (or kxk) same-padding convolution with bias.

    gain sqrt(6) is the Kaiming bound for relu-followed layers; pass 1.0
    for linear outputs.
    """

    def __init__(self, c_in: int, c_out: int, rng: np.random.Generator, name: str,
                 k: int = 3, gain: float = np.sqrt(6)):
        s = gain / np.sqrt(c_in * k * k)
        self.w = Parameter(rng.uniform(-s, s, (c_out, c_in, k, k)), f"{name}.w")
        self.b = Parameter(np.zeros(c_out), f"{name}.b")
        self.padding = k // 2

    @property
    def params(self) -> list[Parameter]:
        return [self.w, self.b]

    def __call__(self, x: Value) -> Value:
        return conv2d(x, self.w, self.b, padding=self.padding)
