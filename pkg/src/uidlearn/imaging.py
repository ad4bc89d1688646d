"""Image decoding, grayscale conversion, stringification, cropping, tiling.

Images are numpy arrays: RGB as (height, width, 3) uint8, grayscale as
(height, width) uint8.  Grayscale uses the weighted sum
0.2989 R + 0.5870 G + 0.1140 B, rounded half away from zero; since all
weights have four decimal digits this is computed exactly in integers.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

RgbImage = np.ndarray  # (h, w, 3) uint8
GrayImage = np.ndarray  # (h, w) uint8


class DecodeError(ValueError):
    pass


class BoundsError(ValueError):
    pass


@dataclass(frozen=True)
class PixelRect:
    """Axis-aligned pixel rectangle, origin at the image's top-left corner."""

    left: int
    top: int
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.left < 0 or self.top < 0:
            raise ValueError("rect offsets must be nonnegative")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("rect extents must be positive")

    def check_inside(self, img: np.ndarray) -> None:
        h, w = img.shape[:2]
        if self.left + self.width > w:
            raise BoundsError(
                f"rect exceeds the right edge ({self.left}+{self.width} > {w})"
            )
        if self.top + self.height > h:
            raise BoundsError(
                f"rect exceeds the bottom edge ({self.top}+{self.height} > {h})"
            )


def decode_image(src: Union[bytes, str, Path]) -> RgbImage:
    """Decode a JPEG or PNG stream/file to an RGB raster; alpha is dropped."""
    try:
        if isinstance(src, (str, Path)):
            with Image.open(src) as im:
                rgb = im.convert("RGB")
                arr = np.asarray(rgb, dtype=np.uint8)
        else:
            with Image.open(io.BytesIO(src)) as im:
                rgb = im.convert("RGB")
                arr = np.asarray(rgb, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc
    if arr.size == 0:
        raise DecodeError("decoded image has no pixels")
    return arr


def encode_png(img: np.ndarray) -> bytes:
    mode = "RGB" if img.ndim == 3 else "L"
    buf = io.BytesIO()
    Image.fromarray(img, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


# Grayscale weights scaled by 10^4; integer arithmetic makes
# round-half-away-from-zero exact for every RGB triple.
_W_R, _W_G, _W_B = 2989, 5870, 1140
_SCALE = 10_000


def to_grayscale(img: RgbImage) -> GrayImage:
    """Weighted grayscale with exact half-away-from-zero rounding."""
    rgb = img.astype(np.int64)
    num = _W_R * rgb[..., 0] + _W_G * rgb[..., 1] + _W_B * rgb[..., 2]
    gray = (num + _SCALE // 2) // _SCALE
    return np.clip(gray, 0, 255).astype(np.uint8)


def linearize(img: GrayImage) -> bytes:
    """Row-major scan (top-left to bottom-right) of a grayscale raster."""
    if img.ndim != 2:
        raise ValueError("linearize expects a grayscale image")
    return np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def crop(img: np.ndarray, rect: PixelRect) -> np.ndarray:
    """Exact pixel copy of ``rect``; the rect must lie fully inside ``img``."""
    rect.check_inside(img)
    return img[rect.top : rect.top + rect.height, rect.left : rect.left + rect.width].copy()


def tile_windows(img: GrayImage, window_w: int, window_h: int) -> list[GrayImage]:
    """Non-overlapping row-major tiling; partial edge tiles are discarded."""
    if window_w <= 0 or window_h <= 0:
        raise ValueError("window extents must be positive")
    h, w = img.shape[:2]
    if window_w > w or window_h > h:
        raise BoundsError(f"window {window_w}x{window_h} exceeds image {w}x{h}")
    tiles: list[GrayImage] = []
    for b in range(h // window_h):
        top = b * window_h
        for a in range(w // window_w):
            left = a * window_w
            tiles.append(img[top : top + window_h, left : left + window_w])
    return tiles
