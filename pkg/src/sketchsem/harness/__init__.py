"""Toy dataset, metrics, CLI and service."""

from .config import load_config, parse_config_text
from .dataset import (
    ToyDataset,
    ToyItem,
    box_downsample,
    embed_view,
    face_sketch,
    gen_toy_dataset,
    labeled_subset,
    load_dataset,
    make_toy_item,
    save_dataset,
    segmap_downsample,
    segnet_view,
)
from .metrics import MetricReport, chamfer, eval_embed, eval_ssi, p_acc
from .pngio import b64_to_image, image_to_b64, image_to_png, png_to_grayscale, png_to_image
from .service import ServiceModels, create_app, serve
from .toyface import (
    DEFAULT_ACCESSORY_RATES,
    ToyFaceSpec,
    render_image,
    render_segmap,
    sample_face_spec,
)

__all__ = [
    "DEFAULT_ACCESSORY_RATES",
    "MetricReport",
    "ServiceModels",
    "ToyDataset",
    "ToyFaceSpec",
    "ToyItem",
    "b64_to_image",
    "box_downsample",
    "chamfer",
    "create_app",
    "embed_view",
    "eval_embed",
    "eval_ssi",
    "face_sketch",
    "gen_toy_dataset",
    "image_to_b64",
    "image_to_png",
    "labeled_subset",
    "load_config",
    "load_dataset",
    "make_toy_item",
    "p_acc",
    "parse_config_text",
    "png_to_grayscale",
    "png_to_image",
    "render_image",
    "render_segmap",
    "sample_face_spec",
    "save_dataset",
    "segmap_downsample",
    "segnet_view",
    "serve",
]
