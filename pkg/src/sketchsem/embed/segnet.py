"""Toy face-segmentation network.

Three conv stages provide the semantic features used by the feature-matching
loss; a small decoder head emits per-pixel logits over the 19 source labels.
Trained once on (image, segmentation-map) pairs, then frozen.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import (
    Adam,
    Parameter,
    Value,
    avg_pool2d,
    relu,
    reshape,
    softmax_cross_entropy,
    transpose,
    upsample2x,
)
from ..autodiff.checkpoint import load_checkpoint, save_checkpoint
from ..autodiff.seeding import child_rng
from ..categories import N_SOURCE_LABELS
from ..errors import CheckpointError
from .layers import Conv


class SegFeatureNet:
    """Stage features (N,C1,R,R), (N,C2,R/2,R/2), (N,C3,R/4,R/4) + pixel logits."""

    def __init__(self, widths: tuple[int, int, int] = (12, 16, 20),
                 rng: np.random.Generator | None = None):
        rng = rng if rng is not None else child_rng(0, "segnet", "init")
        c1, c2, c3 = widths
        self.widths = (c1, c2, c3)
        self.conv1 = Conv(3, c1, rng, "seg.conv1")
        self.conv2 = Conv(c1, c2, rng, "seg.conv2")
        self.conv3 = Conv(c2, c3, rng, "seg.conv3")
        self.up1 = Conv(c3, c2, rng, "seg.up1")
        self.up2 = Conv(c2, N_SOURCE_LABELS, rng, "seg.up2", k=1, gain=1.0)

    @property
    def params(self) -> list[Parameter]:
        return (self.conv1.params + self.conv2.params + self.conv3.params
                + self.up1.params + self.up2.params)

    def features(self, x: Value) -> list[Value]:
        f1 = relu(self.conv1(x))
        f2 = relu(self.conv2(avg_pool2d(f1)))
        f3 = relu(self.conv3(avg_pool2d(f2)))
        return [f1, f2, f3]

    def logits(self, x: Value) -> Value:
        f1, f2, f3 = self.features(x)
        h = relu(self.up1(upsample2x(f3)))
        return self.up2(upsample2x(h))

    def predict(self, image: np.ndarray) -> np.ndarray:
        """Label map (H, W) int for one (3, H, W) image."""
        out = self.logits(Value(image[None])).data[0]
        return np.argmax(out, axis=0).astype(np.int16)

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {p.name: p.data for p in self.params}

    def load_state(self, arrays: dict[str, np.ndarray]) -> None:
        for p in self.params:
            p.data = np.array(arrays[p.name], np.float64)


def train_segnet(images: np.ndarray, segmaps: np.ndarray, steps: int = 400,
                 batch_size: int = 16, lr: float = 0.002, seed: int = 0,
                 widths: tuple[int, int, int] = (12, 16, 20),
                 ) -> tuple[SegFeatureNet, list[float]]:
    """Fit the toy segmenter on (n, 3, R, R) images and (n, R, R) label maps."""
    if len(images) == 0 or len(images) != len(segmaps):
        raise ValueError(f"train_segnet: {len(images)} images, "
                         f"{len(segmaps)} segmaps")
    net = SegFeatureNet(widths, rng=child_rng(seed, "segnet", "init"))
    opt = Adam(net.params, lr=lr)
    rng = child_rng(seed, "segnet", "batches")
    log = []
    for _ in range(steps):
        idx = rng.integers(0, len(images), batch_size)
        logits = net.logits(Value(images[idx]))
        n, k, h, w = logits.shape
        flat = reshape(transpose(logits, (0, 2, 3, 1)), (n * h * w, k))
        loss = softmax_cross_entropy(flat, segmaps[idx].reshape(-1))
        opt.zero_grad()
        loss.backward()
        opt.step()
        log.append(float(loss.data))
    return net, log


def save_segnet(path, net: SegFeatureNet) -> None:
    save_checkpoint(path, net.state_arrays(),
                    {"kind": "segnet", "widths": list(net.widths)})


def load_segnet(path) -> SegFeatureNet:
    arrays, meta = load_checkpoint(path)
    if meta.get("kind") != "segnet":
        raise CheckpointError(f"{path}: not a segmentation checkpoint")
    net = SegFeatureNet(tuple(meta["widths"]))
    net.load_state(arrays)
    return net
