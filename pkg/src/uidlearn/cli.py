"""Headless command-line driver for the full pipeline."""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

from . import features, learn, prototypes
from .imaging import BoundsError, DecodeError, PixelRect, decode_image
from .project_store import Project, ProjectError
from .uid import uid

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPUTE = 2


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _open_project(ctx: click.Context) -> Project:
    try:
        return Project.open_or_init(ctx.obj["project"])
    except ProjectError as exc:
        _fail(str(exc), EXIT_VALIDATION)


def _emit(ctx: click.Context, payload: dict, text: str) -> None:
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(text)


@click.group()
@click.option("--project", type=click.Path(), default=".", help="Project directory.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--threads", type=int, default=1, help="Worker parallelism cap.")
@click.pass_context
def main(ctx: click.Context, project: str, as_json: bool, threads: int) -> None:
    ctx.ensure_object(dict)
    ctx.obj.update(project=project, json=as_json, threads=threads)


@main.command()
@click.pass_context
def init(ctx: click.Context) -> None:
    """Create (or validate) the project directory."""
    p = _open_project(ctx)
    _emit(ctx, {"root": str(p.root)}, f"project ready at {p.root}")


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True))
@click.pass_context
def ingest(ctx: click.Context, files: tuple[str, ...]) -> None:
    """Copy images into the corpus (content-addressed)."""
    p = _open_project(ctx)
    ids, errors = p.ingest_images(files)
    for err in errors:
        click.echo(f"error: {err}", err=True)
    _emit(ctx, {"ids": ids, "errors": errors}, "\n".join(ids))
    if errors:
        sys.exit(EXIT_VALIDATION)


@main.command()
@click.argument("target")
@click.argument("csv_file", type=click.Path(exists=True))
@click.pass_context
def label(ctx: click.Context, target: str, csv_file: str) -> None:
    """Attach labels for TARGET from a two-column CSV (image_id,label)."""
    p = _open_project(ctx)
    labels = {}
    with open(csv_file, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "image_id":
                continue
            labels[row[0]] = row[1]
    try:
        p.set_labels(target, labels)
    except ProjectError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    _emit(ctx, {"target": target, "count": len(labels)}, f"labeled {len(labels)} images for {target}")


@main.group()
def proto() -> None:
    """Prototype management (selection-loop support)."""


@proto.command("add")
@click.argument("image_id")
@click.option("--rect", required=True, help="L,T,W,H in pixels, origin top-left.")
@click.option("--category", required=True)
@click.pass_context
def proto_add(ctx: click.Context, image_id: str, rect: str, category: str) -> None:
    p = _open_project(ctx)
    try:
        l, t, w, h = (int(v) for v in rect.split(","))
        r = PixelRect(l, t, w, h)
    except ValueError as exc:
        _fail(f"bad rect {rect!r}: {exc}", EXIT_VALIDATION)
    if category not in p.manifest["categories"]:
        try:
            p.add_category(category)
        except ProjectError as exc:
            _fail(str(exc), EXIT_VALIDATION)
    try:
        proto_id = p.add_prototype(image_id, r, category)
    except (ProjectError, BoundsError) as exc:
        _fail(str(exc), EXIT_VALIDATION)
    _emit(ctx, {"id": proto_id}, proto_id)


@proto.command("list")
@click.pass_context
def proto_list(ctx: click.Context) -> None:
    p = _open_project(ctx)
    entries = p.manifest["prototypes"]
    text = "\n".join(
        f"{e['id']}  {e['category']:<12} {e['source_image_id']}  "
        f"{e['rect']['left']},{e['rect']['top']},{e['rect']['width']},{e['rect']['height']}  c={e['complexity']}"
        for e in entries
    )
    _emit(ctx, {"prototypes": entries}, text or "(no prototypes)")


@proto.command("matrix")
@click.pass_context
def proto_matrix(ctx: click.Context) -> None:
    """Compute and print the pairwise UID matrix."""
    p = _open_project(ctx)
    ps = p.load_prototype_set()
    try:
        matrix = prototypes.distance_matrix(ps)
    except ValueError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    rows = [[matrix.labels[i]] + [f"{v:.4f}" for v in matrix.values[i]] for i in range(len(matrix.labels))]
    text = "\n".join("  ".join(r) for r in rows)
    _emit(ctx, {"labels": matrix.labels, "values": matrix.values.tolist()}, text)


@proto.command("dendrogram")
@click.option("--cut", type=int, default=None, help="Cluster count (default: number of categories).")
@click.option("--linkage", type=click.Choice(list(prototypes.LINKAGES)), default="average")
@click.pass_context
def proto_dendrogram(ctx: click.Context, cut: int | None, linkage: str) -> None:
    """Cluster the prototypes and print the purity verdict.

    Exits nonzero when the cut is impure, so the selection loop can be
    scripted.
    """
    p = _open_project(ctx)
    ps = p.load_prototype_set()
    try:
        matrix = prototypes.distance_matrix(ps)
        dend = prototypes.hierarchical_cluster(matrix, linkage=linkage)
        m = cut if cut is not None else len(ps.categories)
        partition = prototypes.cut_clusters(dend, m)
        purity = prototypes.purity_check(partition, ps)
    except ValueError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    verdict = "PURE" if purity.pure else "IMPURE"
    text = [dend.to_newick(), f"cut={m}"]
    for i, grp in enumerate(partition):
        text.append(f"cluster {i + 1}: {', '.join(grp)}")
    text.append(verdict)
    if not purity.pure and purity.offending:
        text.append("offending: " + ", ".join(purity.offending))
    _emit(
        ctx,
        {"dendrogram": dend.to_dict(), "newick": dend.to_newick(), "cut": m,
         "partition": partition, "purity": purity.to_dict()},
        "\n".join(text),
    )
    if not purity.pure:
        sys.exit(EXIT_VALIDATION)


@main.command("uid")
@click.argument("image_a", type=click.Path(exists=True))
@click.argument("image_b", type=click.Path(exists=True))
@click.pass_context
def uid_cmd(ctx: click.Context, image_a: str, image_b: str) -> None:
    """Compression-based distance between two image files."""
    try:
        a = decode_image(image_a)
        b = decode_image(image_b)
    except DecodeError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    try:
        value = uid(a, b)
    except ValueError as exc:
        _fail(str(exc), EXIT_COMPUTE)
    _emit(
        ctx,
        {"uid": value.value, "left_complexity": value.left_complexity,
         "right_complexity": value.right_complexity, "joint_complexity": value.joint_complexity},
        f"UID = {value.value!r}  (c_left={value.left_complexity}, "
        f"c_right={value.right_complexity}, c_joint={value.joint_complexity})",
    )


@main.command()
@click.option("--target", default=None, help="Label target to attach (builds a labeled dataset).")
@click.option("--audit", is_flag=True, help="Also write a per-window attribution trail.")
@click.pass_context
def extract(ctx: click.Context, target: str | None, audit: bool) -> None:
    """Generate feature vectors for every corpus image; prints the dataset id."""
    p = _open_project(ctx)
    ps = p.load_prototype_set()
    try:
        ps.validate_for_extraction()
    except ValueError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    labels = p.get_labels(target) if target else None
    if target and not labels:
        _fail(f"no labels stored for target {target!r}", EXIT_VALIDATION)
    rows = []
    trails = {}
    try:
        for img_id in p.image_ids():
            img = p.load_image(img_id)
            if audit:
                fv, trail = features.feature_vector(img, ps, audit=True, workers=ctx.obj["threads"])
                trails[img_id] = trail
            else:
                fv = features.feature_vector(img, ps, workers=ctx.obj["threads"])
            if labels and img_id not in labels:
                _fail(f"missing label for image {img_id}", EXIT_VALIDATION)
            rows.append(features.DatasetRow(image_id=img_id, vector=fv, label=labels.get(img_id) if labels else None))
    except ValueError as exc:
        _fail(str(exc), EXIT_COMPUTE)
    ds = features.Dataset(categories=tuple(ps.categories), rows=rows, target=target if labels else None)
    ds_id = p.save_dataset(ds)
    if audit:
        for img_id, trail in trails.items():
            path = p.root / "datasets" / f"{ds_id}.{img_id}.audit.jsonl"
            path.write_text(features.audit_to_jsonl(trail))
    _emit(ctx, {"dataset_id": ds_id, "rows": len(rows)}, ds_id)


@main.command()
@click.argument("dataset_id")
@click.option("--format", "fmt", type=click.Choice(["csv", "arff", "json"]), required=True)
@click.pass_context
def export(ctx: click.Context, dataset_id: str, fmt: str) -> None:
    """Print a dataset in the requested format."""
    p = _open_project(ctx)
    try:
        ds = p.load_dataset(dataset_id)
    except ProjectError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    out = {"csv": features.to_csv, "arff": features.to_arff, "json": features.to_json}[fmt](ds)
    click.echo(out, nl=False)


@main.command()
@click.argument("dataset_id")
@click.option("--algo", type=click.Choice(list(learn.ALGORITHMS)), default="naive_bayes")
@click.option("--folds", type=int, default=10)
@click.option("--seed", type=int, default=0)
@click.option("--knn-k", type=int, default=3)
@click.pass_context
def cv(ctx: click.Context, dataset_id: str, algo: str, folds: int, seed: int, knn_k: int) -> None:
    """n-fold cross-validation with a ZeroR baseline and paired t-test."""
    p = _open_project(ctx)
    try:
        ds = p.load_dataset(dataset_id)
        report = learn.cross_validate(ds, algo, n=folds, seed=seed, knn_k=knn_k)
    except ProjectError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    except ValueError as exc:
        _fail(str(exc), EXIT_COMPUTE)
    rep_id = p.save_report("cv", report.to_dict())
    _emit(ctx, {"report_id": rep_id, **report.to_dict()}, report.render_table() + f"\nreport: {rep_id}")


@main.command()
@click.argument("dataset_id")
@click.option("--k", type=int, default=3)
@click.option("--seed", type=int, default=0)
@click.pass_context
def kmeans(ctx: click.Context, dataset_id: str, k: int, seed: int) -> None:
    """Seeded k-means with per-cluster centroid profiles."""
    p = _open_project(ctx)
    try:
        ds = p.load_dataset(dataset_id)
        report = learn.kmeans(ds, k, seed=seed)
    except ProjectError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    except ValueError as exc:
        _fail(str(exc), EXIT_COMPUTE)
    rep_id = p.save_report("kmeans", report.to_dict())
    _emit(ctx, {"report_id": rep_id, **report.to_dict()}, report.render_table() + f"\nreport: {rep_id}")


@main.command()
@click.argument("dataset_id")
@click.option("--algo", type=click.Choice(list(learn.ALGORITHMS)), default="naive_bayes")
@click.option("--knn-k", type=int, default=3)
@click.option("--out", type=click.Path(), required=True, help="Model file to write.")
@click.pass_context
def train(ctx: click.Context, dataset_id: str, algo: str, knn_k: int, out: str) -> None:
    """Train on the full dataset and save the model file for `classify`."""
    p = _open_project(ctx)
    try:
        ds = p.load_dataset(dataset_id)
        clf = learn.train(algo, ds.rows, knn_k=knn_k)
    except (ProjectError, ValueError) as exc:
        _fail(str(exc), EXIT_VALIDATION)
    Path(out).write_text(clf.to_json())
    _emit(ctx, {"model": out, "algorithm": algo}, f"model written to {out}")


@main.command()
@click.argument("image_file", type=click.Path(exists=True))
@click.option("--model", type=click.Path(exists=True), required=True)
@click.pass_context
def classify(ctx: click.Context, image_file: str, model: str) -> None:
    """Classify an image: feature vector against the project prototypes,
    then the saved model."""
    p = _open_project(ctx)
    ps = p.load_prototype_set()
    clf = learn.TrainedClassifier.from_json(Path(model).read_text())
    try:
        img = decode_image(image_file)
        label = learn.classify_image(img, ps, clf)
    except DecodeError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    except ValueError as exc:
        _fail(str(exc), EXIT_COMPUTE)
    _emit(ctx, {"label": label}, label)


@main.command()
@click.option("--bind", default="127.0.0.1:8571", help="addr:port to listen on.")
@click.pass_context
def serve(ctx: click.Context, bind: str) -> None:
    """Run the local HTTP API."""
    from .service import serve as run_server

    p = _open_project(ctx)
    host, _, port = bind.rpartition(":")
    run_server(p, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
