"""Raster and image encoders emitting style codes.

Three small conv trunks with global average pooling (so any input
resolution works) and one linear head each: sketch raster -> shared code,
sketch raster -> 8 per-row codes, face image -> 10 per-row codes.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import Parameter, Value, avg_pool2d, mean, relu, reshape
from ..autodiff.seeding import child_rng
from ..errors import ShapeError
from ..ssi.stem import Linear
from .codes import N_APPEAR_ROWS, N_SKETCH_ROWS, StyleCodes
from .generator import ToyGenerator
from .layers import Conv
from .raster import N_RASTER_CHANNELS


class ConvTrunk:
    """conv-pool pyramid ending in a global average: (N, C, H, W) -> (N, F)."""

    def __init__(self, c_in: int, widths: tuple[int, ...],
                 rng: np.random.Generator, name: str):
        self.convs = []
        prev = c_in
        for i, c in enumerate(widths):
            self.convs.append(Conv(prev, c, rng, f"{name}.conv{i}"))
            prev = c
        self.out_dim = prev

    @property
    def params(self) -> list[Parameter]:
        return [p for c in self.convs for p in c.params]

    def __call__(self, x: Value) -> Value:
        for i, conv in enumerate(self.convs):
            x = relu(conv(x))
            if i < len(self.convs) - 1 and min(x.shape[2], x.shape[3]) >= 2:
                x = avg_pool2d(x, 2)
        return mean(x, axis=(2, 3))


class CodeEncoder:
    """Trunk + linear head emitting ``rows`` codes of width ``dim``."""

    def __init__(self, c_in: int, rows: int, dim: int, widths: tuple[int, ...],
                 rng: np.random.Generator, name: str):
        self.rows = rows
        self.dim = dim
        self.trunk = ConvTrunk(c_in, widths, rng, name)
        self.head = Linear(self.trunk.out_dim, rows * dim, rng, f"{name}.head")

    @property
    def params(self) -> list[Parameter]:
        return self.trunk.params + self.head.params

    def __call__(self, x: Value) -> Value:
        n = x.shape[0]
        return reshape(self.head(self.trunk(x)), (n, self.rows, self.dim))


class EncoderSet:
    """The three encoders of the embedding: w_c, w_fs from the sketch raster
    and w_ff from a face image."""

    def __init__(self, dim: int = 64, widths: tuple[int, ...] = (16, 24, 32),
                 rng: np.random.Generator | None = None):
        rng = rng if rng is not None else child_rng(0, "enc", "init")
        self.dim = dim
        self.widths = tuple(widths)
        self.enc_c = CodeEncoder(N_RASTER_CHANNELS, 1, dim, self.widths, rng, "enc.c")
        self.enc_fs = CodeEncoder(N_RASTER_CHANNELS, N_SKETCH_ROWS, dim,
                                  self.widths, rng, "enc.fs")
        self.enc_ff = CodeEncoder(3, N_APPEAR_ROWS, dim, self.widths, rng, "enc.ff")

    @property
    def params(self) -> list[Parameter]:
        return self.enc_c.params + self.enc_fs.params + self.enc_ff.params


class EmbedModel:
    """Encoders + generator, with the single-item spec surface."""

    def __init__(self, dim: int = 64, resolution: int = 32,
                 base_channels: int = 32, widths: tuple[int, ...] = (16, 24, 32),
                 rng: np.random.Generator | None = None):
        rng = rng if rng is not None else child_rng(0, "embed", "init")
        self.encoders = EncoderSet(dim, widths, rng)
        self.generator = ToyGenerator(dim, resolution, base_channels, rng)
        self.dim = dim
        self.resolution = resolution

    @property
    def params(self) -> list[Parameter]:
        return self.encoders.params + self.generator.params

    def encode(self, raster: np.ndarray, face: np.ndarray | None = None,
               seed: int = 0) -> StyleCodes:
        """Codes for one sketch raster (23, H, W); appearance from ``face``
        (3, H, W) when given, else from a seeded latent draw."""
        if raster.ndim != 3 or raster.shape[0] != N_RASTER_CHANNELS:
            raise ShapeError(f"encode: raster {raster.shape}, "
                             f"want ({N_RASTER_CHANNELS}, H, W)")
        x = Value(raster[None])
        w_c = self.encoders.enc_c(x)
        w_fs = self.encoders.enc_fs(x)
        if face is not None:
            if face.ndim != 3 or face.shape[0] != 3:
                raise ShapeError(f"encode: face {face.shape}, want (3, H, W)")
            w_ff = reshape(self.encoders.enc_ff(Value(face[None])),
                           (N_APPEAR_ROWS, self.dim))
        else:
            w_ff = self.generator.sample_appearance(seed)
        return StyleCodes(
            w_c=reshape(w_c, (1, self.dim)),
            w_fs=reshape(w_fs, (N_SKETCH_ROWS, self.dim)),
            w_ff=w_ff,
            w_bar=self.generator.average_code(),
        )

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {p.name: p.data for p in self.params}

    def load_state(self, arrays: dict[str, np.ndarray]) -> None:
        for p in self.params:
            p.data = np.array(arrays[p.name], np.float64)
