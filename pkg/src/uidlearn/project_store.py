"""Project directory persistence.

A project is a directory with a JSON manifest and subdirectories for
the image corpus, prototypes, exported datasets, and reports.  Images
are content-addressed (sha256 prefix), so re-ingesting a file is a
no-op.  Writes go through temp-file rename, so readers always see a
consistent manifest.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from . import features
from .imaging import DecodeError, PixelRect, crop, decode_image, encode_png, linearize, to_grayscale
from .prototypes import Prototype, PrototypeSet
from .strdist import ComplexityCachedString

FORMAT_VERSION = 1

_SUBDIRS = ("corpus", "prototypes", "datasets", "reports")


class ProjectError(ValueError):
    pass


def _write_atomic(path: Path, data: Union[str, bytes]) -> None:
    mode = "w" if isinstance(data, str) else "wb"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, obj: dict) -> None:
    _write_atomic(path, json.dumps(obj, indent=2, sort_keys=True))


@dataclass
class Project:
    root: Path
    manifest: dict

    # -- lifecycle -----------------------------------------------------

    @classmethod
    def open_or_init(cls, root: Union[str, Path]) -> "Project":
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        for sub in _SUBDIRS:
            (root / sub).mkdir(exist_ok=True)
        manifest_path = root / "project.json"
        if manifest_path.exists():
            try:
                manifest = json.loads(manifest_path.read_text())
            except json.JSONDecodeError as exc:
                raise ProjectError(f"corrupt manifest at {manifest_path}: {exc}") from exc
            version = manifest.get("format_version")
            if version != FORMAT_VERSION:
                raise ProjectError(f"unsupported project format_version {version!r}")
            project = cls(root=root, manifest=manifest)
            project.validate()
            return project
        manifest = {
            "format_version": FORMAT_VERSION,
            "images": {},
            "labels": {},
            "categories": [],
            "prototypes": [],
            "counters": {"prototype": 0, "dataset": 0, "report": 0},
        }
        project = cls(root=root, manifest=manifest)
        project.save()
        return project

    def save(self) -> None:
        _write_json(self.root / "project.json", self.manifest)

    def validate(self) -> None:
        for img_id, entry in self.manifest["images"].items():
            if not (self.root / entry["path"]).exists():
                raise ProjectError(f"corpus image {img_id} missing at {entry['path']}")
        for proto in self.manifest["prototypes"]:
            if not (self.root / proto["path"]).exists():
                raise ProjectError(f"prototype {proto['id']} missing at {proto['path']}")

    # -- corpus --------------------------------------------------------

    def ingest_images(self, paths: Sequence[Union[str, Path]]) -> tuple[list[str], list[str]]:
        """Copy decodable files into the corpus; returns (ids, errors).

        Undecodable files are reported per-file and do not stop the rest.
        """
        ids: list[str] = []
        errors: list[str] = []
        for p in paths:
            p = Path(p)
            try:
                data = p.read_bytes()
                img = decode_image(data)
            except (OSError, DecodeError) as exc:
                errors.append(f"{p}: {exc}")
                continue
            img_id = hashlib.sha256(data).hexdigest()[:16]
            if img_id not in self.manifest["images"]:
                ext = p.suffix.lower() if p.suffix.lower() in (".png", ".jpg", ".jpeg") else ".png"
                rel = f"corpus/{img_id}{ext}"
                _write_atomic(self.root / rel, data)
                h, w = img.shape[:2]
                self.manifest["images"][img_id] = {
                    "path": rel,
                    "width": int(w),
                    "height": int(h),
                    "original_name": p.name,
                }
            ids.append(img_id)
        self.save()
        return ids, errors

    def image_ids(self) -> list[str]:
        return sorted(self.manifest["images"])

    def load_image(self, img_id: str):
        entry = self.manifest["images"].get(img_id)
        if entry is None:
            raise ProjectError(f"unknown image id {img_id}")
        return decode_image(self.root / entry["path"])

    def image_bytes(self, img_id: str) -> bytes:
        entry = self.manifest["images"].get(img_id)
        if entry is None:
            raise ProjectError(f"unknown image id {img_id}")
        return (self.root / entry["path"]).read_bytes()

    # -- labels --------------------------------------------------------

    def set_labels(self, target: str, labels: dict[str, str]) -> None:
        unknown = [i for i in labels if i not in self.manifest["images"]]
        if unknown:
            raise ProjectError(f"labels for unknown image ids: {', '.join(sorted(unknown))}")
        table = self.manifest["labels"].setdefault(target, {})
        table.update({k: str(v) for k, v in labels.items()})
        self.save()

    def get_labels(self, target: str) -> dict[str, str]:
        return dict(self.manifest["labels"].get(target, {}))

    # -- categories and prototypes ------------------------------------

    def add_category(self, name: str) -> None:
        if name in self.manifest["categories"]:
            raise ProjectError(f"category {name!r} already exists")
        self.manifest["categories"].append(name)
        self.save()

    def remove_category(self, name: str) -> None:
        if name not in self.manifest["categories"]:
            raise ProjectError(f"unknown category {name!r}")
        if any(p["category"] == name for p in self.manifest["prototypes"]):
            raise ProjectError(f"category {name!r} still has prototypes")
        self.manifest["categories"].remove(name)
        self.save()

    def add_prototype(self, source_image_id: str, rect: PixelRect, category: str) -> str:
        if category not in self.manifest["categories"]:
            raise ProjectError(f"unknown category {category!r}")
        img = self.load_image(source_image_id)
        gray = to_grayscale(crop(img, rect))
        cached = ComplexityCachedString.from_symbols(linearize(gray))
        self.manifest["counters"]["prototype"] += 1
        proto_id = f"p{self.manifest['counters']['prototype']:04d}"
        (self.root / "prototypes" / category).mkdir(exist_ok=True)
        rel = f"prototypes/{category}/{proto_id}.png"
        _write_atomic(self.root / rel, encode_png(gray))
        self.manifest["prototypes"].append(
            {
                "id": proto_id,
                "category": category,
                "source_image_id": source_image_id,
                "rect": {"left": rect.left, "top": rect.top, "width": rect.width, "height": rect.height},
                "complexity": cached.complexity,
                "path": rel,
            }
        )
        self.save()
        return proto_id

    def prototype_bytes(self, proto_id: str) -> bytes:
        for p in self.manifest["prototypes"]:
            if p["id"] == proto_id:
                return (self.root / p["path"]).read_bytes()
        raise ProjectError(f"unknown prototype id {proto_id}")

    def remove_prototype(self, proto_id: str) -> None:
        for i, p in enumerate(self.manifest["prototypes"]):
            if p["id"] == proto_id:
                path = self.root / p["path"]
                if path.exists():
                    path.unlink()
                del self.manifest["prototypes"][i]
                self.save()
                return
        raise ProjectError(f"unknown prototype id {proto_id}")

    def load_prototype_set(self) -> PrototypeSet:
        protos = []
        for p in self.manifest["prototypes"]:
            gray = decode_image(self.root / p["path"])
            gray = to_grayscale(gray)
            cached = ComplexityCachedString(data=linearize(gray), complexity=p["complexity"])
            cached.check()
            r = p["rect"]
            protos.append(
                Prototype(
                    id=p["id"],
                    category=p["category"],
                    source_image_id=p["source_image_id"],
                    rect=PixelRect(r["left"], r["top"], r["width"], r["height"]),
                    string=cached,
                    gray=gray,
                )
            )
        return PrototypeSet(categories=list(self.manifest["categories"]), prototypes=protos)

    # -- datasets and reports -----------------------------------------

    def save_dataset(self, ds: features.Dataset) -> str:
        self.manifest["counters"]["dataset"] += 1
        ds_id = f"d{self.manifest['counters']['dataset']:04d}"
        _write_atomic(self.root / "datasets" / f"{ds_id}.json", features.to_json(ds))
        self.save()
        return ds_id

    def load_dataset(self, ds_id: str) -> features.Dataset:
        path = self.root / "datasets" / f"{ds_id}.json"
        if not path.exists():
            raise ProjectError(f"unknown dataset id {ds_id}")
        return features.dataset_from_json(path.read_text())

    def dataset_ids(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "datasets").glob("d*.json"))

    def save_report(self, kind: str, payload: dict) -> str:
        self.manifest["counters"]["report"] += 1
        rep_id = f"r{self.manifest['counters']['report']:04d}"
        _write_json(self.root / "reports" / f"{rep_id}.json", {"kind": kind, **payload})
        self.save()
        return rep_id

    def load_report(self, rep_id: str) -> dict:
        path = self.root / "reports" / f"{rep_id}.json"
        if not path.exists():
            raise ProjectError(f"unknown report id {rep_id}")
        return json.loads(path.read_text())

    def report_ids(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "reports").glob("r*.json"))
