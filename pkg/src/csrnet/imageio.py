"""Image decoding, encoding, and 8-bit quantization.

Images cross the API boundary as (H,W,3) float32 arrays in [0,1]. The round
trip u8 -> float -> u8 is exact: dividing by 255 and re-quantizing with
round-half-up reproduces every byte.
"""

import io
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError


class DecodeError(ValueError):
    """Raised when bytes do not decode to an image."""


def quantize_u8(image):
    """Map [0,1] floats to bytes, rounding halves away from zero (0.5 -> 128)."""
    scaled = np.clip(image, 0.0, 1.0).astype(np.float64) * 255.0
    return np.floor(scaled + 0.5).astype(np.uint8)


def from_u8(pixels):
    return (pixels.astype(np.float32) / np.float32(255.0)).astype(np.float32)


def decode_image(data):
    """PNG/JPEG bytes to a float image; raises DecodeError on garbage input."""
    try:
        with Image.open(io.BytesIO(data)) as img:
            rgb = img.convert("RGB")
            pixels = np.asarray(rgb, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc
    return from_u8(pixels)


def encode_png(image):
    buf = io.BytesIO()
    Image.fromarray(quantize_u8(image), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def load_image(path):
    # missing files stay OSError subclasses; DecodeError means unreadable content
    path = Path(path)
    data = path.read_bytes()
    try:
        return decode_image(data)
    except DecodeError as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def save_image(path, image):
    Path(path).write_bytes(encode_png(image))
