"""Stroke-labeling training loop.

Batches whole sketches: strokes of a batch run through the encoder as one
padded sequence batch, the per-sketch graphs merge block-diagonally, and a
single cross-entropy covers every stroke.  One Adam step per batch with the
learning rate decayed per epoch.  Dataset augmentation adds the top-3 and
top-10 simplified variant of every sketch.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..autodiff import Adam, softmax_cross_entropy
from ..autodiff.checkpoint import load_checkpoint, save_checkpoint
from ..autodiff.seeding import child_rng, root_seed
from ..errors import CheckpointError
from ..pipeline import simplify
from ..sketch import VectorSketch
from .graph import build_graph, merge_graphs
from .infer import classify, vote_postprocess
from .ssem import SsemModel
from .stem import StemModel


@dataclass
class SsiConfig:
    lr: float = 0.001
    gamma: float = 0.98
    batch_size: int = 10
    epochs: int = 30
    k_nn: int = 5
    hidden: int = 64
    layers: int = 3
    width: int = 64
    hops: int = 3
    seed: int | None = None
    augment: bool = True
    normalize: bool = True
    stop_accuracy: float | None = None  # early-stop on held-out accuracy


def _check_labeled(dataset: list[VectorSketch]) -> None:
    if not dataset:
        raise ValueError("train_ssi: empty dataset")
    for i, sk in enumerate(dataset):
        if len(sk) == 0:
            raise ValueError(f"train_ssi: sketch {i} has no strokes")
        if any(s.label is None for s in sk.strokes):
            raise ValueError(f"train_ssi: sketch {i} has unlabeled strokes")


def augmented_items(dataset: list[VectorSketch]) -> list[VectorSketch]:
    """Each sketch plus its top-3 and top-10 simplified variants."""
    items: list[VectorSketch] = []
    for sk in dataset:
        items.append(sk)
        for k in (3, 10):
            var = simplify(sk, k)
            if len(var):
                items.append(var)
    return items


def stroke_accuracy(sketches: list[VectorSketch], ssem: SsemModel, stem: StemModel,
                    k_nn: int = 5, vote: bool = False) -> float:
    """Fraction of strokes labeled correctly over a labeled sketch list."""
    hit = total = 0
    for sk in sketches:
        preds = classify(sk, ssem, stem, k_nn)
        labels = np.array([p[0] for p in preds])
        if vote and len(labels):
            labels = vote_postprocess(
                labels, [s.parent_id for s in sk.strokes], [len(s) for s in sk.strokes])
        truth = np.array([s.label for s in sk.strokes])
        hit += int((labels == truth).sum())
        total += len(truth)
    return hit / total if total else 0.0


def train_ssi(dataset: list[VectorSketch], config: SsiConfig = SsiConfig(),
              eval_dataset: list[VectorSketch] | None = None,
              ) -> tuple[SsemModel, StemModel, list[dict]]:
    """Train the stroke-labeling models; returns (ssem, stem, per-epoch log)."""
    _check_labeled(dataset)
    seed = root_seed(config.seed)
    ssem = SsemModel(hidden=config.hidden, layers=config.layers,
                     rng=child_rng(seed, "ssi", "init-ssem"),
                     normalize=config.normalize)
    stem = StemModel(feature_dim=ssem.feature_dim, width=config.width,
                     hops=config.hops, rng=child_rng(seed, "ssi", "init-stem"))
    params = ssem.params + stem.params
    opt = Adam(params, lr=config.lr, gamma=config.gamma)

    items = augmented_items(dataset) if config.augment else list(dataset)
    log: list[dict] = []
    for epoch in range(config.epochs):
        opt.set_epoch(epoch)
        order = child_rng(seed, "ssi", "epoch", epoch).permutation(len(items))
        losses = []
        hit = total = 0
        for lo in range(0, len(order), config.batch_size):
            batch = [items[i] for i in order[lo:lo + config.batch_size]]
            strokes = [s for sk in batch for s in sk.strokes]
            canvases = [sk.canvas for sk in batch for _ in sk.strokes]
            feats = ssem.encode_strokes(strokes, canvases)
            graph = merge_graphs(
                [build_graph(sk, None, config.k_nn, stem.edge_mlp) for sk in batch])
            logits = stem.logits(graph, feats)
            targets = np.array([s.label for s in strokes])
            loss = softmax_cross_entropy(logits, targets)
            opt.zero_grad()
            loss.backward()
            opt.step()
            losses.append(float(loss.data))
            hit += int((np.argmax(logits.data, axis=1) == targets).sum())
            total += len(targets)
        entry = {
            "epoch": epoch,
            "loss": float(np.mean(losses)),
            "train_acc": hit / total,
        }
        if eval_dataset:
            entry["val_acc"] = stroke_accuracy(eval_dataset, ssem, stem, config.k_nn)
        log.append(entry)
        if (config.stop_accuracy is not None and eval_dataset
                and entry["val_acc"] >= config.stop_accuracy):
            break
    return ssem, stem, log


# ---------------------------------------------------------------------------
# Checkpoint plumbing


def save_ssi(path: str | Path, ssem: SsemModel, stem: StemModel,
             k_nn: int = 5) -> None:
    arrays = {**ssem.state_arrays(), **stem.state_arrays()}
    meta = {
        "kind": "ssi",
        "hidden": ssem.hidden,
        "layers": ssem.layers,
        "normalize": ssem.normalize,
        "width": stem.width,
        "hops": stem.hops,
        "k_nn": k_nn,
    }
    save_checkpoint(path, arrays, meta)


def load_ssi(path: str | Path) -> tuple[SsemModel, StemModel, dict]:
    arrays, meta = load_checkpoint(path)
    if meta.get("kind") != "ssi":
        raise CheckpointError(f"{path}: not a stroke-labeling checkpoint")
    ssem = SsemModel(hidden=int(meta["hidden"]), layers=int(meta["layers"]),
                     rng=child_rng(0, "ssi", "init-ssem"),
                     normalize=bool(meta["normalize"]))
    stem = StemModel(feature_dim=ssem.feature_dim, width=int(meta["width"]),
                     hops=int(meta["hops"]), rng=child_rng(0, "ssi", "init-stem"))
    ssem.load_state(arrays)
    stem.load_state(arrays)
    return ssem, stem, meta
