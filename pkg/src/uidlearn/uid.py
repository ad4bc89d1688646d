"""Image distance: the normalized parse-complexity distance applied to
the row-major grayscale stringifications of two images.

The two images may have different sizes.  The concatenation order is
(first argument, second argument); pipeline call sites always pass
(window, prototype).
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexity import lz76_complexity
from .imaging import GrayImage, RgbImage, linearize, to_grayscale
from .strdist import ComplexityCachedString


@dataclass(frozen=True)
class UidValue:
    """A distance value plus the three complexities it was computed from."""

    value: float
    left_complexity: int
    right_complexity: int
    joint_complexity: int

    def recompute(self) -> float:
        lo = min(self.left_complexity, self.right_complexity)
        hi = max(self.left_complexity, self.right_complexity)
        return (self.joint_complexity - lo) / hi


def uid_cached(a: ComplexityCachedString, b: ComplexityCachedString) -> UidValue:
    """UID from pre-stringified images with cached complexities; only the
    concatenation is parsed afresh."""
    if not a.data or not b.data:
        raise ValueError("UID is undefined for empty images")
    joint = lz76_complexity(a.data + b.data)
    lo = min(a.complexity, b.complexity)
    hi = max(a.complexity, b.complexity)
    return UidValue(
        value=(joint - lo) / hi,
        left_complexity=a.complexity,
        right_complexity=b.complexity,
        joint_complexity=joint,
    )


def image_string(img: RgbImage | GrayImage) -> ComplexityCachedString:
    """Stringify an image (grayscale conversion if needed) and cache its
    complexity."""
    gray = to_grayscale(img) if img.ndim == 3 else img
    return ComplexityCachedString.from_symbols(linearize(gray))


def uid(i: RgbImage | GrayImage, j: RgbImage | GrayImage) -> UidValue:
    """UID between two images of arbitrary (possibly different) sizes."""
    if i.size == 0 or j.size == 0:
        raise ValueError("UID is undefined for empty images")
    return uid_cached(image_string(i), image_string(j))
