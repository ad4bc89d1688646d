"""LZ-complexity string distances.

``d_raw`` is the unnormalized distance
``max(c(xy) - c(x), c(yx) - c(y))``; ``d_star_star`` is the normalized
distance ``(c(xy) - min(c(x), c(y))) / max(c(x), c(y))`` used throughout
the image pipeline.  The normalized distance uses the concatenation
order xy as written and is therefore not symmetric in general; callers
fix an argument order.  It is not a metric: a value of 0 means the
strings are mutually compressible, not identical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexity import Symbols, as_symbols, lz76_complexity


@dataclass(frozen=True)
class ComplexityCachedString:
    """A symbol string bundled with its precomputed LZ76 complexity.

    Repeated distance evaluations against the same string (every window
    vs. every prototype) then only parse the concatenation afresh.
    """

    data: bytes
    complexity: int

    @classmethod
    def from_symbols(cls, s: Symbols) -> "ComplexityCachedString":
        data = as_symbols(s)
        return cls(data=data, complexity=lz76_complexity(data))

    def check(self) -> None:
        if self.complexity != lz76_complexity(self.data):
            raise ValueError("cached complexity is stale")


def _cached(s: Symbols | ComplexityCachedString) -> ComplexityCachedString:
    if isinstance(s, ComplexityCachedString):
        return s
    return ComplexityCachedString.from_symbols(s)


def d_raw(x: Symbols, y: Symbols) -> int:
    """Unnormalized LZ distance max{c(xy)-c(x), c(yx)-c(y)}."""
    xb = as_symbols(x)
    yb = as_symbols(y)
    if not xb or not yb:
        raise ValueError("d_raw is undefined for empty strings")
    return max(
        lz76_complexity(xb + yb) - lz76_complexity(xb),
        lz76_complexity(yb + xb) - lz76_complexity(yb),
    )


def d_star_star(x: Symbols | ComplexityCachedString, y: Symbols | ComplexityCachedString) -> float:
    """Normalized LZ distance (c(xy) - min{c(x),c(y)}) / max{c(x),c(y)}."""
    xc = _cached(x)
    yc = _cached(y)
    if not xc.data or not yc.data:
        raise ValueError("d** is undefined for empty strings")
    joint = lz76_complexity(xc.data + yc.data)
    return (joint - min(xc.complexity, yc.complexity)) / max(xc.complexity, yc.complexity)
