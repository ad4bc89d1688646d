"""Local HTTP/JSON API over a project directory.

Serves corpus management, prototype CRUD, the distance-matrix /
dendrogram step, feature extraction, and learning runs.  Long
computations run as background jobs polled via /jobs/{id}; at most one
job of a given kind runs at a time (409 otherwise).  Mutations are
serialized by a project-wide lock.
"""

from __future__ import annotations

import threading
import traceback
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, Request, Response, UploadFile
from pydantic import BaseModel

from . import features, learn, prototypes
from .imaging import BoundsError, DecodeError, PixelRect
from .project_store import Project, ProjectError


@dataclass
class Job:
    id: str
    kind: str
    state: str = "queued"  # queued -> running -> done | failed
    progress: float = 0.0
    result: Optional[dict] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "state": self.state,
            "progress": self.progress,
            "result": self.result,
            "error": self.error,
        }


class JobManager:
    def __init__(self) -> None:
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job id {job_id}")
        return job

    def start(self, kind: str, fn) -> Job:
        with self._lock:
            if any(j.kind == kind and j.state in ("queued", "running") for j in self._jobs.values()):
                raise HTTPException(409, f"a {kind} job is already running")
            job = Job(id=uuid.uuid4().hex[:12], kind=kind)
            self._jobs[job.id] = job

        def run() -> None:
            job.state = "running"
            try:
                job.result = fn(job)
                job.progress = 1.0
                job.state = "done"
            except Exception as exc:  # job failures are reported, not raised
                job.error = f"{exc}"
                job.state = "failed"
                traceback.print_exc()

        threading.Thread(target=run, daemon=True).start()
        return job


class RectBody(BaseModel):
    left: int
    top: int
    width: int
    height: int


class PrototypeBody(BaseModel):
    source_image_id: str
    rect: RectBody
    category: str


class CategoryBody(BaseModel):
    name: str


class CvBody(BaseModel):
    dataset_id: str
    algorithm: str = "naive_bayes"
    folds: int = 10
    seed: int = 0
    knn_k: int = 3


class KmeansBody(BaseModel):
    dataset_id: str
    k: int = 3
    seed: int = 0


class ExtractBody(BaseModel):
    target: Optional[str] = None
    workers: int = 1


def create_app(project: Project) -> FastAPI:
    app = FastAPI(title="uidlearn")
    jobs = JobManager()
    mutate = threading.Lock()
    state = {"matrix": None, "dendrogram": None, "matrix_fresh": False}

    def bad_request(exc: Exception) -> HTTPException:
        return HTTPException(400, str(exc))

    @app.get("/corpus")
    def corpus() -> dict:
        return {
            "images": [
                {"id": img_id, **{k: v for k, v in entry.items() if k != "path"}}
                for img_id, entry in sorted(project.manifest["images"].items())
            ],
            "labels": project.manifest["labels"],
        }

    @app.post("/corpus/images")
    async def ingest(files: list[UploadFile]) -> dict:
        import tempfile
        from pathlib import Path

        with mutate, tempfile.TemporaryDirectory() as tmp:
            paths = []
            for f in files:
                p = Path(tmp) / (f.filename or "upload.png")
                p.write_bytes(await f.read())
                paths.append(p)
            ids, errors = project.ingest_images(paths)
        return {"ids": ids, "errors": errors}

    @app.get("/corpus/images/{img_id}/raw")
    def raw_image(img_id: str) -> Response:
        try:
            data = project.image_bytes(img_id)
        except ProjectError as exc:
            raise HTTPException(404, str(exc))
        media = "image/png" if data[:4] == b"\x89PNG" else "image/jpeg"
        return Response(content=data, media_type=media)

    @app.post("/labels/{target}")
    def set_labels(target: str, labels: dict[str, str]) -> dict:
        with mutate:
            try:
                project.set_labels(target, labels)
            except ProjectError as exc:
                raise bad_request(exc)
        return {"target": target, "count": len(project.get_labels(target))}

    @app.get("/categories")
    def get_categories() -> dict:
        return {"categories": project.manifest["categories"]}

    @app.post("/categories")
    def add_category(body: CategoryBody) -> dict:
        with mutate:
            try:
                project.add_category(body.name)
            except ProjectError as exc:
                raise bad_request(exc)
        return {"categories": project.manifest["categories"]}

    @app.delete("/categories/{name}")
    def delete_category(name: str) -> dict:
        with mutate:
            try:
                project.remove_category(name)
            except ProjectError as exc:
                raise bad_request(exc)
        return {"categories": project.manifest["categories"]}

    @app.get("/prototypes")
    def get_prototypes() -> dict:
        return {"prototypes": project.manifest["prototypes"]}

    @app.post("/prototypes")
    def add_prototype(body: PrototypeBody) -> dict:
        with mutate:
            try:
                rect = PixelRect(body.rect.left, body.rect.top, body.rect.width, body.rect.height)
                proto_id = project.add_prototype(body.source_image_id, rect, body.category)
            except (ProjectError, BoundsError, ValueError) as exc:
                raise bad_request(exc)
            state["matrix_fresh"] = False
        return {"id": proto_id}

    @app.get("/prototypes/{proto_id}/raw")
    def raw_prototype(proto_id: str) -> Response:
        try:
            data = project.prototype_bytes(proto_id)
        except ProjectError as exc:
            raise HTTPException(404, str(exc))
        return Response(content=data, media_type="image/png")

    @app.delete("/prototypes/{proto_id}")
    def delete_prototype(proto_id: str) -> dict:
        with mutate:
            try:
                project.remove_prototype(proto_id)
            except ProjectError as exc:
                raise HTTPException(404, str(exc))
            state["matrix_fresh"] = False
        return {"deleted": proto_id}

    @app.post("/prototypes/matrix")
    def start_matrix() -> dict:
        ps = project.load_prototype_set()
        if ps.total < 2:
            raise HTTPException(400, "need at least two prototypes")

        def run(job: Job) -> dict:
            matrix = prototypes.distance_matrix(ps)
            dend = prototypes.hierarchical_cluster(matrix)
            state["matrix"] = matrix
            state["dendrogram"] = dend
            state["matrix_fresh"] = True
            return {"labels": matrix.labels, "order": len(matrix.labels)}

        return jobs.start("matrix", run).to_dict()

    @app.get("/prototypes/dendrogram")
    def dendrogram(cut: Optional[int] = None) -> dict:
        dend = state["dendrogram"]
        if dend is None:
            raise HTTPException(404, "no dendrogram computed yet; POST /prototypes/matrix first")
        ps = project.load_prototype_set()
        m = cut if cut is not None else len(ps.categories)
        stale = not state["matrix_fresh"] or set(dend.labels) != {p.id for p in ps.prototypes}
        try:
            partition = prototypes.cut_clusters(dend, m)
        except ValueError as exc:
            raise bad_request(exc)
        if set(dend.labels) == {p.id for p in ps.prototypes}:
            purity = prototypes.purity_check(partition, ps).to_dict()
        else:
            purity = None  # prototypes changed since the matrix ran
        return {
            "dendrogram": dend.to_dict(),
            "newick": dend.to_newick(),
            "cut": m,
            "partition": partition,
            "purity": purity,
            "stale": stale,
            "leaf_categories": {p.id: p.category for p in ps.prototypes},
        }

    @app.post("/features/extract")
    def start_extract(body: ExtractBody) -> dict:
        ps = project.load_prototype_set()
        try:
            ps.validate_for_extraction()
        except ValueError as exc:
            raise bad_request(exc)
        labels = project.get_labels(body.target) if body.target else None
        if body.target and not labels:
            raise HTTPException(400, f"no labels stored for target {body.target!r}")

        def run(job: Job) -> dict:
            ids = project.image_ids()
            rows = []
            for i, img_id in enumerate(ids):
                img = project.load_image(img_id)
                fv = features.feature_vector(img, ps, workers=body.workers)
                label = labels.get(img_id) if labels else None
                if labels and label is None:
                    raise ValueError(f"missing label for image {img_id}")
                rows.append(features.DatasetRow(image_id=img_id, vector=fv, label=label))
                job.progress = (i + 1) / max(len(ids), 1)
            ds = features.Dataset(categories=tuple(ps.categories), rows=rows,
                                  target=body.target if labels else None)
            ds_id = project.save_dataset(ds)
            return {"dataset_id": ds_id, "rows": len(rows)}

        return jobs.start("extract", run).to_dict()

    @app.get("/datasets/{ds_id}")
    def get_dataset(ds_id: str, request: Request, format: str = "json") -> Response:
        try:
            ds = project.load_dataset(ds_id)
        except ProjectError as exc:
            raise HTTPException(404, str(exc))
        if format == "csv":
            return Response(features.to_csv(ds), media_type="text/csv")
        if format == "arff":
            return Response(
                features.to_arff(ds),
                media_type="text/plain",
                headers={"Content-Disposition": f'attachment; filename="{ds_id}.arff"'},
            )
        if format == "json":
            return Response(features.to_json(ds), media_type="application/json")
        raise HTTPException(400, f"unknown format {format!r}")

    @app.post("/learn/cv")
    def start_cv(body: CvBody) -> dict:
        try:
            ds = project.load_dataset(body.dataset_id)
        except ProjectError as exc:
            raise HTTPException(404, str(exc))
        if body.algorithm not in learn.ALGORITHMS:
            raise HTTPException(400, f"unknown algorithm {body.algorithm!r}")

        def run(job: Job) -> dict:
            report = learn.cross_validate(ds, body.algorithm, n=body.folds, seed=body.seed, knn_k=body.knn_k)
            rep_id = project.save_report("cv", report.to_dict())
            return {"report_id": rep_id}

        return jobs.start("cv", run).to_dict()

    @app.post("/learn/kmeans")
    def start_kmeans(body: KmeansBody) -> dict:
        try:
            ds = project.load_dataset(body.dataset_id)
        except ProjectError as exc:
            raise HTTPException(404, str(exc))

        def run(job: Job) -> dict:
            report = learn.kmeans(ds, body.k, seed=body.seed)
            rep_id = project.save_report("kmeans", report.to_dict())
            return {"report_id": rep_id}

        return jobs.start("kmeans", run).to_dict()

    @app.get("/reports")
    def reports() -> dict:
        return {"reports": project.report_ids()}

    @app.get("/reports/{rep_id}")
    def get_report(rep_id: str) -> dict:
        try:
            return project.load_report(rep_id)
        except ProjectError as exc:
            raise HTTPException(404, str(exc))

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str) -> dict:
        return jobs.get(job_id).to_dict()

    return app


def serve(project: Project, host: str = "127.0.0.1", port: int = 8571) -> None:
    import uvicorn

    uvicorn.run(create_app(project), host=host, port=port)
