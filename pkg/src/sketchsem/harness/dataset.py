"""Toy dataset assembly: rendered faces paired with GT vector sketches.

Each face is rendered to a segmap and a shaded image, then pushed through
the raster pipeline (contour + edges, merge, thin, trace) to get its ground
truth sketch.  Only labeled strokes are kept: far-from-contour edge pixels
carry no category and the classifier trains on labeled strokes alone.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..autodiff.seeding import child_rng
from ..embed.raster import render_sketch_raster
from ..embed.train import EmbedItem
from ..pipeline import SegMap, extract_contour, extract_edges, merge_maps, vectorize
from ..sketch import VectorSketch, parse, serialize
from .toyface import DEFAULT_ACCESSORY_RATES, ToyFaceSpec, render_image, render_segmap, sample_face_spec


@dataclass(frozen=True)
class ToyItem:
    spec: ToyFaceSpec
    segmap: SegMap
    image: np.ndarray  # (3, R, R) in [0, 1]
    sketch: VectorSketch  # GT, every stroke labeled


@dataclass(frozen=True)
class ToyDataset:
    train: tuple[ToyItem, ...]
    test: tuple[ToyItem, ...]
    canvas: int
    seed: int
    accessory_rates: dict[str, float]

    @property
    def items(self) -> tuple[ToyItem, ...]:
        return self.train + self.test


def face_sketch(segmap: SegMap, image: np.ndarray) -> VectorSketch:
    """Full GT sketch: contour + image edges, merged, thinned, traced."""
    merged = merge_maps(extract_contour(segmap), extract_edges(image))
    return vectorize(merged)


def labeled_subset(sketch: VectorSketch) -> VectorSketch:
    return VectorSketch(
        tuple(s for s in sketch.strokes if s.label is not None), sketch.canvas)


def make_toy_item(spec: ToyFaceSpec, canvas: int = 96) -> ToyItem:
    segmap = render_segmap(spec, canvas)
    image = render_image(spec, canvas)
    sketch = labeled_subset(face_sketch(segmap, image))
    return ToyItem(spec, segmap, image, sketch)


def gen_toy_dataset(n: int, seed: int = 0,
                    accessory_rates: dict[str, float] | None = None,
                    canvas: int = 96) -> ToyDataset:
    """n rendered faces with GT sketches, split 90/10 train/test."""
    if n < 1:
        raise ValueError(f"need at least one face, got n={n}")
    rates = dict(DEFAULT_ACCESSORY_RATES)
    if accessory_rates:
        rates.update(accessory_rates)
    rng = child_rng(seed, "toy", "specs")
    items = tuple(make_toy_item(sample_face_spec(rng, rates), canvas)
                  for _ in range(n))
    n_train = max(1, int(round(n * 0.9))) if n > 1 else 1
    return ToyDataset(items[:n_train], items[n_train:], canvas, seed, rates)


# ---------------------------------------------------------------------------
# Views for the two trainers


def box_downsample(image: np.ndarray, factor: int) -> np.ndarray:
    """(C, H, W) -> (C, H/f, W/f) by box averaging."""
    c, h, w = image.shape
    if h % factor or w % factor:
        raise ValueError(f"image size {h}x{w} not divisible by {factor}")
    return image.reshape(c, h // factor, factor, w // factor, factor).mean(axis=(2, 4))


def segmap_downsample(seg: SegMap, factor: int) -> np.ndarray:
    """Label grid subsampled at cell centers (labels cannot be averaged)."""
    mid = factor // 2
    return seg.grid[mid::factor, mid::factor].copy()


def embed_view(items: tuple[ToyItem, ...] | list[ToyItem],
               resolution: int = 32) -> list[EmbedItem]:
    """Training pairs for the embedder: sketch raster + downsampled image."""
    out = []
    for it in items:
        src = it.image.shape[-1]
        if src % resolution:
            raise ValueError(f"render size {src} not divisible by {resolution}")
        raster = render_sketch_raster(it.sketch, resolution)
        image = box_downsample(it.image, src // resolution)
        out.append(EmbedItem(raster, image, it.spec.accessories))
    return out


def segnet_view(items: tuple[ToyItem, ...] | list[ToyItem],
                resolution: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """(images, segmaps) arrays for segmentation-feature pretraining."""
    images, maps = [], []
    for it in items:
        factor = it.image.shape[-1] // resolution
        images.append(box_downsample(it.image, factor))
        maps.append(segmap_downsample(it.segmap, factor))
    return np.stack(images), np.stack(maps)


# ---------------------------------------------------------------------------
# Disk format: manifest.json + sketches.json + two raw arrays

_MANIFEST = "manifest.json"
_SKETCHES = "sketches.json"
_SEGMAPS = "segmaps.npy"
_IMAGES = "images.npy"


def save_dataset(path: str | Path, dataset: ToyDataset) -> None:
    """Write a dataset directory; same dataset always gives the same bytes."""
    d = Path(path)
    d.mkdir(parents=True, exist_ok=True)
    items = dataset.items
    manifest = {
        "n": len(items),
        "n_train": len(dataset.train),
        "canvas": dataset.canvas,
        "seed": dataset.seed,
        "accessory_rates": dataset.accessory_rates,
        "specs": [dataclasses.asdict(it.spec) for it in items],
    }
    (d / _MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True))
    (d / _SKETCHES).write_text(
        json.dumps([serialize(it.sketch) for it in items]))
    np.save(d / _SEGMAPS, np.stack([it.segmap.grid for it in items]).astype(np.uint8))
    quantized = np.stack([it.image for it in items]) * 255.0
    np.save(d / _IMAGES, np.round(quantized).astype(np.uint8))


def load_dataset(path: str | Path) -> ToyDataset:
    d = Path(path)
    manifest = json.loads((d / _MANIFEST).read_text())
    sketches = [parse(s) for s in json.loads((d / _SKETCHES).read_text())]
    segmaps = np.load(d / _SEGMAPS).astype(np.int16)
    images = np.load(d / _IMAGES).astype(np.float64) / 255.0
    items = tuple(
        ToyItem(ToyFaceSpec(**spec), SegMap(seg), img, sk)
        for spec, seg, img, sk in zip(manifest["specs"], segmaps, images, sketches))
    n_train = manifest["n_train"]
    return ToyDataset(items[:n_train], items[n_train:], manifest["canvas"],
                      manifest["seed"], manifest["accessory_rates"])
