"""Feature-vector generation: window scanning and per-category
nearest-prototype voting.

An image is tiled by non-overlapping windows of the maximum prototype
size.  Each window is assigned to the category whose prototypes are
closest in the Euclidean-norm sense over UID values; the normalized
assignment counts form the image's feature vector on the M-simplex.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .imaging import GrayImage, RgbImage, linearize, tile_windows, to_grayscale
from .prototypes import Prototype, PrototypeSet
from .strdist import ComplexityCachedString
from .uid import uid_cached


@dataclass(frozen=True)
class FeatureVector:
    categories: tuple[str, ...]
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def values(self) -> tuple[float, ...]:
        m = self.total
        return tuple(c / m for c in self.counts)

    def exact_values(self) -> tuple[Fraction, ...]:
        m = self.total
        return tuple(Fraction(c, m) for c in self.counts)

    def to_dict(self) -> dict:
        return {
            "categories": list(self.categories),
            "counts": list(self.counts),
            "values": list(self.values),
        }


@dataclass(frozen=True)
class WindowAttribution:
    index: int
    aggregates: tuple[float, ...]
    chosen: int  # argmin category index, lowest index on ties


def category_aggregate(
    window: GrayImage | ComplexityCachedString, prototypes: Sequence[Prototype]
) -> float:
    """Euclidean norm of the UID values from the window to every
    prototype of one category."""
    if not prototypes:
        raise ValueError("category has no prototypes")
    ws = window if isinstance(window, ComplexityCachedString) else ComplexityCachedString.from_symbols(linearize(window))
    return math.sqrt(sum(uid_cached(ws, p.string).value ** 2 for p in prototypes))


def _attribute(ws: ComplexityCachedString, groups: Sequence[Sequence[Prototype]]) -> tuple[tuple[float, ...], int]:
    aggs = tuple(category_aggregate(ws, g) for g in groups)
    return aggs, min(range(len(aggs)), key=lambda i: (aggs[i], i))


_worker_groups: Optional[list[list[Prototype]]] = None


def _init_worker(groups: list[list[Prototype]]) -> None:
    global _worker_groups
    _worker_groups = groups


def _attribute_batch(batch: list[tuple[int, bytes]]) -> list[tuple[int, tuple[float, ...], int]]:
    out = []
    memo: dict[bytes, tuple[tuple[float, ...], int]] = {}
    for idx, data in batch:
        if data not in memo:
            memo[data] = _attribute(ComplexityCachedString.from_symbols(data), _worker_groups)
        aggs, chosen = memo[data]
        out.append((idx, aggs, chosen))
    return out


def feature_vector(
    img: GrayImage | RgbImage,
    ps: PrototypeSet,
    audit: bool = False,
    workers: int = 1,
) -> FeatureVector | tuple[FeatureVector, list[WindowAttribution]]:
    """Normalized window-assignment counts of an image.

    With ``audit`` the per-window aggregates and decisions are returned
    alongside.  ``workers`` > 1 fans windows out across processes;
    counts are aggregated by window index, so results do not depend on
    scheduling.
    """
    ps.validate_for_extraction()
    gray = to_grayscale(img) if img.ndim == 3 else img
    win_w, win_h = ps.window_size()
    tiles = tile_windows(gray, win_w, win_h)
    groups = [ps.by_category(c) for c in ps.categories]

    results: list[tuple[int, tuple[float, ...], int]] = []
    if workers <= 1:
        memo: dict[bytes, tuple[tuple[float, ...], int]] = {}
        for idx, tile in enumerate(tiles):
            data = linearize(tile)
            if data not in memo:
                memo[data] = _attribute(ComplexityCachedString.from_symbols(data), groups)
            aggs, chosen = memo[data]
            results.append((idx, aggs, chosen))
    else:
        payload = [(idx, linearize(t)) for idx, t in enumerate(tiles)]
        chunk = max(1, len(payload) // (workers * 4))
        batches = [payload[i : i + chunk] for i in range(0, len(payload), chunk)]
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(groups,)) as pool:
            for part in pool.map(_attribute_batch, batches):
                results.extend(part)
        results.sort(key=lambda r: r[0])

    counts = [0] * len(ps.categories)
    trail: list[WindowAttribution] = []
    for idx, aggs, chosen in results:
        counts[chosen] += 1
        if audit:
            trail.append(WindowAttribution(index=idx, aggregates=aggs, chosen=chosen))
    fv = FeatureVector(categories=tuple(ps.categories), counts=tuple(counts))
    return (fv, trail) if audit else fv


@dataclass(frozen=True)
class DatasetRow:
    image_id: str
    vector: FeatureVector
    label: Optional[str] = None


@dataclass
class Dataset:
    categories: tuple[str, ...]
    rows: list[DatasetRow] = field(default_factory=list)
    target: Optional[str] = None  # target variable name when labeled

    @property
    def classes(self) -> list[str]:
        return sorted({r.label for r in self.rows if r.label is not None})

    def labeled(self) -> bool:
        return self.target is not None


def build_dataset(
    corpus: Sequence[tuple[str, RgbImage | GrayImage]],
    ps: PrototypeSet,
    labels: Optional[dict[str, str]] = None,
    target: Optional[str] = None,
    workers: int = 1,
) -> Dataset:
    """One feature-vector row per corpus image, in corpus order."""
    if labels is not None:
        missing = [img_id for img_id, _ in corpus if img_id not in labels]
        if missing:
            raise ValueError(f"missing labels for images: {', '.join(missing)}")
    rows = []
    for img_id, img in corpus:
        fv = feature_vector(img, ps, workers=workers)
        rows.append(DatasetRow(image_id=img_id, vector=fv, label=labels[img_id] if labels else None))
    return Dataset(categories=tuple(ps.categories), rows=rows, target=target if labels else None)


def to_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["image_id"] + [f"v_{c}" for c in ds.categories]
    if ds.labeled():
        header.append("target")
    writer.writerow(header)
    for row in ds.rows:
        rec = [row.image_id] + [repr(v) for v in row.vector.values]
        if ds.labeled():
            rec.append(row.label)
        writer.writerow(rec)
    return buf.getvalue()


def to_arff(ds: Dataset, relation: str = "uid_features") -> str:
    lines = [f"@RELATION {relation}", ""]
    for c in ds.categories:
        lines.append(f"@ATTRIBUTE v_{c} NUMERIC")
    if ds.labeled():
        lines.append("@ATTRIBUTE class {" + ",".join(ds.classes) + "}")
    lines.append("")
    lines.append("@DATA")
    for row in ds.rows:
        rec = [repr(v) for v in row.vector.values]
        if ds.labeled():
            rec.append(row.label)
        lines.append(",".join(rec))
    return "\n".join(lines) + "\n"


def to_json(ds: Dataset) -> str:
    return json.dumps(
        {
            "categories": list(ds.categories),
            "target": ds.target,
            "rows": [
                {
                    "image_id": r.image_id,
                    "counts": list(r.vector.counts),
                    "values": list(r.vector.values),
                    "label": r.label,
                }
                for r in ds.rows
            ],
        },
        indent=2,
        sort_keys=True,
    )


def dataset_from_json(text: str) -> Dataset:
    obj = json.loads(text)
    cats = tuple(obj["categories"])
    rows = [
        DatasetRow(
            image_id=r["image_id"],
            vector=FeatureVector(categories=cats, counts=tuple(r["counts"])),
            label=r.get("label"),
        )
        for r in obj["rows"]
    ]
    return Dataset(categories=cats, rows=rows, target=obj.get("target"))


def audit_to_jsonl(trail: Sequence[WindowAttribution]) -> str:
    out = []
    for w in trail:
        out.append(json.dumps({"index": w.index, "aggregates": list(w.aggregates), "chosen": w.chosen}))
    return "\n".join(out) + ("\n" if out else "")
