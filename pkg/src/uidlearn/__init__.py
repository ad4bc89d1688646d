"""Compression-distance image features and learning tools."""

from .complexity import ExhaustiveHistory, exhaustive_history, is_reproducible, lz76_complexity
from .strdist import ComplexityCachedString, d_raw, d_star_star
from .uid import UidValue, uid, uid_cached

__all__ = [
    "ExhaustiveHistory",
    "exhaustive_history",
    "is_reproducible",
    "lz76_complexity",
    "ComplexityCachedString",
    "d_raw",
    "d_star_star",
    "UidValue",
    "uid",
    "uid_cached",
]

__version__ = "0.1.0"
