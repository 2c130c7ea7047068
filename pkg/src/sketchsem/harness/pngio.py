"""PNG encode/decode helpers shared by the CLI and the service."""

from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image

from ..errors import ShapeError


def _to_hwc_uint8(image: np.ndarray) -> np.ndarray:
    img = np.asarray(image, np.float64)
    if img.ndim == 3 and img.shape[0] == 3:
        img = img.transpose(1, 2, 0)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ShapeError(f"expected an RGB image, got shape {image.shape}")
    return np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def image_to_png(image: np.ndarray) -> bytes:
    """Encode (3, H, W) or (H, W, 3) floats in [0, 1] as PNG bytes."""
    buf = io.BytesIO()
    Image.fromarray(_to_hwc_uint8(image), "RGB").save(buf, "PNG")
    return buf.getvalue()


def png_to_image(data: bytes) -> np.ndarray:
    """Decode PNG bytes to a (3, H, W) float array in [0, 1]."""
    arr = np.asarray(Image.open(io.BytesIO(data)).convert("RGB"), np.float64)
    return arr.transpose(2, 0, 1) / 255.0


def png_to_grayscale(data: bytes) -> np.ndarray:
    """Decode PNG bytes to an (H, W) integer grid of raw pixel values."""
    return np.asarray(Image.open(io.BytesIO(data)).convert("L"), np.int16)


def image_to_b64(image: np.ndarray) -> str:
    return base64.b64encode(image_to_png(image)).decode("ascii")


def b64_to_image(text: str) -> np.ndarray:
    return png_to_image(base64.b64decode(text, validate=True))
