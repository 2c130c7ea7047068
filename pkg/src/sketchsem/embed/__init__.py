"""Face embedding: style-code encoders, toy generator, losses, training."""

from .codes import (
    N_APPEAR_ROWS,
    N_SKETCH_ROWS,
    N_STYLE_ROWS,
    StyleCodes,
    fuse_codes,
    fuse_rows,
    interpolate,
)
from .encoders import CodeEncoder, ConvTrunk, EmbedModel, EncoderSet
from .generator import MappingHead, ToyGenerator, clip01, generate
from .layers import Conv
from .losses import (
    DEFAULT_LAMBDAS,
    loss_l2,
    loss_lpips,
    loss_reg_weighted,
    loss_sfm,
    loss_total,
)
from .perceptual import PerceptualNet
from .raster import N_RASTER_CHANNELS, render_sketch_raster
from .segnet import SegFeatureNet, load_segnet, save_segnet, train_segnet
from .train import (
    ACCESSORY_NAMES,
    DEFAULT_MULTIPLIERS,
    EmbedConfig,
    EmbedItem,
    load_embed,
    reconstruct,
    resampled_indices,
    save_embed,
    train_embed,
)

__all__ = [
    "N_APPEAR_ROWS",
    "N_SKETCH_ROWS",
    "N_STYLE_ROWS",
    "StyleCodes",
    "fuse_codes",
    "fuse_rows",
    "interpolate",
    "CodeEncoder",
    "ConvTrunk",
    "EmbedModel",
    "EncoderSet",
    "MappingHead",
    "ToyGenerator",
    "clip01",
    "generate",
    "Conv",
    "DEFAULT_LAMBDAS",
    "loss_l2",
    "loss_lpips",
    "loss_reg_weighted",
    "loss_sfm",
    "loss_total",
    "PerceptualNet",
    "N_RASTER_CHANNELS",
    "render_sketch_raster",
    "SegFeatureNet",
    "load_segnet",
    "save_segnet",
    "train_segnet",
    "ACCESSORY_NAMES",
    "DEFAULT_MULTIPLIERS",
    "EmbedConfig",
    "EmbedItem",
    "load_embed",
    "reconstruct",
    "resampled_indices",
    "save_embed",
    "train_embed",
]
