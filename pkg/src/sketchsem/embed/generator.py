"""Style-modulated toy generator.

A learned 4x4 constant is carried through upsample+conv blocks to the output
resolution.  Each conv is one of 18 modulation sites: its input is scaled
per-channel by an affine function of one style row.  Site counts per block
are chosen so rows 1-8 land exactly on the coarse blocks and rows 9-18 on
the fine ones, keeping the sketch/appearance split aligned with resolution.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import (
    Parameter,
    Value,
    add,
    as_value,
    broadcast_to,
    matmul,
    mean,
    mul,
    relu,
    reshape,
    transpose,
    upsample2x,
)
from ..autodiff.seeding import child_rng
from ..errors import ShapeError
from .codes import N_STYLE_ROWS
from .layers import Conv

# modulation sites per upsampling block; the 8|10 boundary always falls on
# a block edge
SITE_LAYOUTS = {8: (8, 10), 16: (4, 4, 10), 32: (4, 4, 5, 5), 64: (4, 4, 4, 3, 3)}


def clip01(x: Value) -> Value:
    """Clamp to [0, 1] with straight-through gradient inside the range."""
    return add(relu(x), mul(relu(add(x, -1.0)), -1.0))


class MappingHead:
    """2-layer MLP from latent z to W; its mean over a fixed latent batch
    is the average code w_bar."""

    def __init__(self, dim: int, rng: np.random.Generator, name: str = "gen.map"):
        s1, s2 = np.sqrt(6) / np.sqrt(dim), 1.0 / np.sqrt(dim)
        self.w1 = Parameter(rng.uniform(-s1, s1, (dim, dim)), f"{name}.w1")
        self.b1 = Parameter(np.zeros((1, dim)), f"{name}.b1")
        self.w2 = Parameter(rng.uniform(-s2, s2, (dim, dim)), f"{name}.w2")
        self.b2 = Parameter(np.zeros((1, dim)), f"{name}.b2")

    @property
    def params(self) -> list[Parameter]:
        return [self.w1, self.b1, self.w2, self.b2]

    def __call__(self, z: Value) -> Value:
        h = relu(add(matmul(z, self.w1), self.b1))
        return add(matmul(h, self.w2), self.b2)


class ToyGenerator:
    """18-site modulated synthesis network, output (N, 3, R, R) in [0, 1]."""

    # latents feeding w_bar are a structural constant, not run-dependent
    WBAR_BATCH = 64

    def __init__(self, dim: int = 64, resolution: int = 32, base_channels: int = 32,
                 rng: np.random.Generator | None = None):
        if resolution not in SITE_LAYOUTS:
            raise ValueError(f"resolution must be one of {sorted(SITE_LAYOUTS)}, "
                             f"got {resolution}")
        rng = rng if rng is not None else child_rng(0, "gen", "init")
        self.dim = dim
        self.resolution = resolution
        self.base_channels = base_channels
        self.site_counts = SITE_LAYOUTS[resolution]
        self.mapping = MappingHead(dim, rng)
        self.channels = [max(base_channels >> i, 8)
                         for i in range(len(self.site_counts))]
        self.const = Parameter(
            rng.uniform(-1, 1, (self.channels[0], 4, 4)), "gen.const")
        self.adapters: list[tuple[Parameter, Parameter]] = []
        self.convs: list[Conv] = []
        c_prev = self.channels[0]
        site = 0
        for b, n_sites in enumerate(self.site_counts):
            c_out = self.channels[b]
            for _ in range(n_sites):
                sa = 1.0 / np.sqrt(dim)
                self.adapters.append((
                    Parameter(rng.uniform(-sa, sa, (dim, c_prev)), f"gen.a{site}.w"),
                    Parameter(np.zeros((1, c_prev)), f"gen.a{site}.b")))
                self.convs.append(Conv(c_prev, c_out, rng, f"gen.c{site}"))
                c_prev = c_out
                site += 1
        self.out_conv = Conv(c_prev, 3, rng, "gen.out", k=1, gain=1.0)
        self.out_conv.b.data[:] = 0.5
        self._wbar_z = child_rng(0, "embed", "wbar-latents").normal(
            size=(self.WBAR_BATCH, dim))

    @property
    def params(self) -> list[Parameter]:
        out = self.mapping.params + [self.const]
        for (aw, ab), conv in zip(self.adapters, self.convs):
            out += [aw, ab] + conv.params
        return out + self.out_conv.params

    def average_code(self) -> Value:
        """w_bar: the mapping's mean over the fixed latent batch, (1, D).

        Computed with gradient so the regularizer trains the mapping toward
        the center of the codes it is pulled against.
        """
        w = self.mapping(Value(self._wbar_z))
        return mean(w, axis=0, keepdims=True)

    def synth(self, w: Value) -> Value:
        """Generate a batch: w (N, 18, D) -> images (N, 3, R, R) in [0, 1]."""
        w = as_value(w)
        if w.data.ndim != 3 or w.shape[1:] != (N_STYLE_ROWS, self.dim):
            raise ShapeError(f"synth: want (N, {N_STYLE_ROWS}, {self.dim}), "
                             f"got {w.shape}")
        n = w.shape[0]
        x = reshape(self.const, (1,) + self.const.shape)
        x = broadcast_to(x, (n,) + self.const.shape)
        site = 0
        for b, n_sites in enumerate(self.site_counts):
            if b > 0:
                x = upsample2x(x)
            for _ in range(n_sites):
                aw, ab = self.adapters[site]
                scale = add(add(matmul(w[:, site, :], aw), ab), 1.0)
                x = mul(x, reshape(scale, scale.shape + (1, 1)))
                x = relu(self.convs[site](x))
                site += 1
        return clip01(self.out_conv(x))

    def sample_appearance(self, seed: int) -> Value:
        """Seeded W draw through the mapping, duplicated over the 10
        appearance rows: (10, D)."""
        z = child_rng(seed, "embed", "appearance").normal(size=(1, self.dim))
        w = self.mapping(Value(z))
        return broadcast_to(w, (10, self.dim))

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {p.name: p.data for p in self.params}

    def load_state(self, arrays: dict[str, np.ndarray]) -> None:
        for p in self.params:
            p.data = np.array(arrays[p.name], np.float64)


def generate(w, generator: ToyGenerator) -> Value:
    """One image (R, R, 3) in [0, 1] from a fused 18xD code."""
    w = as_value(w)
    if w.shape != (N_STYLE_ROWS, generator.dim):
        raise ShapeError(f"generate: want ({N_STYLE_ROWS}, {generator.dim}), "
                         f"got {w.shape}")
    img = generator.synth(reshape(w, (1,) + w.shape))
    return transpose(reshape(img, img.shape[1:]), (1, 2, 0))
