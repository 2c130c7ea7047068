"""Joint encoder + generator training.

Scarce-accessory items are replicated per epoch (hat 23x, glasses 19x,
earring 3x, necklace 16x; an item with several accessories uses the largest
multiplier).  Each step reconstructs a batch of faces from their sketch
raster plus the face itself as appearance source, under the five-term loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..autodiff import Adam, Value, reshape
from ..autodiff.checkpoint import load_checkpoint, save_checkpoint
from ..autodiff.seeding import child_rng, root_seed
from ..errors import CheckpointError
from .codes import N_APPEAR_ROWS, N_SKETCH_ROWS, fuse_rows
from .encoders import EmbedModel
from .losses import DEFAULT_LAMBDAS, loss_total
from .perceptual import PerceptualNet
from .segnet import SegFeatureNet

ACCESSORY_NAMES = ("hat", "glasses", "earring", "necklace")
DEFAULT_MULTIPLIERS = (23, 19, 3, 16)


@dataclass
class EmbedItem:
    """One training pair: sketch raster, target face, accessory flags."""

    raster: np.ndarray                      # (23, R, R)
    image: np.ndarray                       # (3, R, R) in [0, 1]
    accessories: tuple[bool, bool, bool, bool] = (False, False, False, False)


@dataclass
class EmbedConfig:
    dim: int = 64
    resolution: int = 32
    base_channels: int = 32
    widths: tuple[int, ...] = (16, 24, 32)
    lr: float = 0.001
    batch_size: int = 8
    steps: int = 2000
    seed: int | None = None
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    multipliers: tuple[int, int, int, int] = DEFAULT_MULTIPLIERS


def resampled_indices(accessories: list[tuple[bool, ...]],
                      multipliers: tuple[int, ...] = DEFAULT_MULTIPLIERS,
                      ) -> np.ndarray:
    """Epoch index list with each item repeated by its largest applicable
    multiplier (1 for accessory-free items).  Deterministic."""
    out = []
    for i, flags in enumerate(accessories):
        reps = max([m for m, f in zip(multipliers, flags) if f], default=1)
        out.extend([i] * reps)
    return np.array(out, int)


def train_embed(dataset: list[EmbedItem], segnet: SegFeatureNet,
                config: EmbedConfig = EmbedConfig(),
                ) -> tuple[EmbedModel, list[float]]:
    """Train encoders and generator jointly; returns (model, per-step loss)."""
    if not dataset:
        raise ValueError("train_embed: empty dataset")
    r = config.resolution
    for i, item in enumerate(dataset):
        if item.image.shape != (3, r, r):
            raise ValueError(f"train_embed: item {i} image {item.image.shape}, "
                             f"want (3, {r}, {r})")
    seed = root_seed(config.seed)
    model = EmbedModel(config.dim, config.resolution, config.base_channels,
                       config.widths, rng=child_rng(seed, "embed", "init"))
    pnet = PerceptualNet()
    opt = Adam(model.params, lr=config.lr)
    pool = resampled_indices([it.accessories for it in dataset],
                             config.multipliers)
    log: list[float] = []
    epoch = 0
    order: list[int] = []
    while len(log) < config.steps:
        if not order:
            perm = child_rng(seed, "embed", "epoch", epoch).permutation(len(pool))
            order = list(pool[perm])
            epoch += 1
        batch = [order.pop() for _ in range(min(config.batch_size, len(order)))]
        rasters = np.stack([dataset[i].raster for i in batch])
        images = np.stack([dataset[i].image for i in batch])
        x = Value(images)
        w_c = model.encoders.enc_c(Value(rasters))
        w_fs = model.encoders.enc_fs(Value(rasters))
        w_ff = model.encoders.enc_ff(x)
        w_bar = model.generator.average_code()
        w = fuse_rows(w_c, w_fs, w_ff, w_bar)
        x_hat = model.generator.synth(w)
        loss = loss_total(x, x_hat, w, w_bar, pnet, segnet, config.lambdas)
        opt.zero_grad()
        loss.backward()
        opt.step()
        log.append(float(loss.data))
    return model, log


def reconstruct(model: EmbedModel, raster: np.ndarray,
                face: np.ndarray | None = None, seed: int = 0) -> np.ndarray:
    """Convenience inference: raster (+ optional appearance face) -> (R, R, 3)."""
    from .generator import generate
    from .codes import fuse_codes
    codes = model.encode(raster, face, seed)
    return generate(fuse_codes(codes), model.generator).data


# ---------------------------------------------------------------------------
# Checkpoint plumbing


def save_embed(path: str | Path, model: EmbedModel) -> None:
    meta = {
        "kind": "embed",
        "dim": model.dim,
        "resolution": model.resolution,
        "base_channels": model.generator.base_channels,
        "widths": list(model.encoders.widths),
    }
    save_checkpoint(path, model.state_arrays(), meta)


def load_embed(path: str | Path) -> EmbedModel:
    arrays, meta = load_checkpoint(path)
    if meta.get("kind") != "embed":
        raise CheckpointError(f"{path}: not an embedding checkpoint")
    model = EmbedModel(int(meta["dim"]), int(meta["resolution"]),
                       int(meta["base_channels"]), tuple(meta["widths"]))
    model.load_state(arrays)
    return model
