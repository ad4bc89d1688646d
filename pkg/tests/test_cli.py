import json

import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image

from planted import KINDS, PROTO_OFFSETS, compose_image, texture_masters, tile_palette
from uidlearn.cli import main
from uidlearn.imaging import decode_image
from uidlearn.uid import uid


def write_png(path, arr):
    mode = "RGB" if arr.ndim == 3 else "L"
    Image.fromarray(arr, mode=mode).save(path, format="PNG")
    return str(path)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def master_files(tmp_path):
    masters = texture_masters()
    return {
        kind: write_png(tmp_path / f"{kind}.png", np.stack([masters[kind]] * 3, axis=-1))
        for kind in KINDS
    }


def run(runner, proj, *args, expect=0, as_json=False):
    argv = ["--project", str(proj)]
    if as_json:
        argv.append("--json")
    argv += list(args)
    result = runner.invoke(main, argv, catch_exceptions=False)
    assert result.exit_code == expect, result.output
    return result


def setup_planted_project(runner, proj, master_files):
    run(runner, proj, "init")
    out = run(runner, proj, "ingest", *master_files.values(), as_json=True)
    ids = json.loads(out.output)["ids"]
    id_of = dict(zip(master_files.keys(), ids))
    for kind in KINDS:
        for dx, dy in PROTO_OFFSETS:
            run(runner, proj, "proto", "add", id_of[kind],
                "--rect", f"{dx},{dy},45,17", "--category", kind)
    return id_of


class TestBasics:
    def test_init(self, runner, tmp_path):
        result = run(runner, tmp_path / "proj", "init")
        assert "project ready" in result.output

    def test_ingest_and_proto_list(self, runner, tmp_path, master_files):
        proj = tmp_path / "proj"
        setup_planted_project(runner, proj, master_files)
        result = run(runner, proj, "proto", "list")
        assert result.output.count("p0") >= 12

    def test_ingest_bad_file(self, runner, tmp_path):
        proj = tmp_path / "proj"
        bad = tmp_path / "bad.png"
        bad.write_bytes(b"junk")
        run(runner, proj, "init")
        run(runner, proj, "ingest", str(bad), expect=1)

    def test_proto_add_out_of_bounds(self, runner, tmp_path, master_files):
        proj = tmp_path / "proj"
        run(runner, proj, "init")
        out = run(runner, proj, "ingest", master_files["noise"], as_json=True)
        img_id = json.loads(out.output)["ids"][0]
        result = run(runner, proj, "proto", "add", img_id,
                     "--rect", "120,0,45,17", "--category", "c", expect=1)


class TestUidCommand:
    def test_self_uid_matches_library(self, runner, tmp_path, master_files):
        proj = tmp_path / "proj"
        run(runner, proj, "init")
        f = master_files["noise"]
        result = run(runner, proj, "uid", f, f, as_json=True)
        body = json.loads(result.output)
        expected = uid(decode_image(f), decode_image(f))
        assert body["uid"] == expected.value
        assert body["joint_complexity"] == expected.joint_complexity
        # value recomputable from the printed complexities
        lo = min(body["left_complexity"], body["right_complexity"])
        hi = max(body["left_complexity"], body["right_complexity"])
        assert body["uid"] == (body["joint_complexity"] - lo) / hi


class TestDendrogram:
    def test_pure_exit_zero(self, runner, tmp_path, master_files):
        proj = tmp_path / "proj"
        setup_planted_project(runner, proj, master_files)
        result = run(runner, proj, "proto", "dendrogram", "--cut", "4")
        assert "PURE" in result.output

    def test_impure_exit_nonzero(self, runner, tmp_path, master_files):
        proj = tmp_path / "proj"
        setup_planted_project(runner, proj, master_files)
        result = run(runner, proj, "proto", "dendrogram", "--cut", "2", expect=1)
        assert "IMPURE" in result.output

    def test_matrix_prints_grid(self, runner, tmp_path, master_files):
        proj = tmp_path / "proj"
        setup_planted_project(runner, proj, master_files)
        result = run(runner, proj, "proto", "matrix", as_json=True)
        body = json.loads(result.output)
        assert len(body["labels"]) == 12
        assert len(body["values"]) == 12


class TestPipeline:
    @pytest.fixture
    def full_project(self, runner, tmp_path, master_files):
        proj = tmp_path / "proj"
        id_of = setup_planted_project(runner, proj, master_files)
        palette = tile_palette()
        rng = np.random.default_rng(5)
        ids = []
        for i in range(8):
            mix = (
                {"constant": 0.6, "stripes": 0.2, "checker": 0.1, "noise": 0.1}
                if i % 2 == 0
                else {"constant": 0.1, "stripes": 0.1, "checker": 0.2, "noise": 0.6}
            )
            f = write_png(tmp_path / f"img{i}.png", compose_image(mix, 2, 2, rng, palette))
            out = run(runner, proj, "ingest", f, as_json=True)
            ids.append(json.loads(out.output)["ids"][0])
        labels_csv = tmp_path / "labels.csv"
        lines = ["image_id,label"] + [f"{img_id},{i % 2}" for i, img_id in enumerate(ids)]
        lines += [f"{img_id},0" for img_id in id_of.values()]
        labels_csv.write_text("\n".join(lines) + "\n")
        run(runner, proj, "label", "humidity", str(labels_csv))
        return proj, ids

    def test_extract_export_cv_kmeans_classify(self, runner, tmp_path, full_project):
        proj, ids = full_project
        out = run(runner, proj, "extract", "--target", "humidity", as_json=True)
        ds_id = json.loads(out.output)["dataset_id"]

        csv_out = run(runner, proj, "export", ds_id, "--format", "csv")
        assert csv_out.output.splitlines()[0].startswith("image_id,v_constant")
        arff_out = run(runner, proj, "export", ds_id, "--format", "arff")
        assert "@RELATION" in arff_out.output

        cv1 = run(runner, proj, "cv", ds_id, "--algo", "knn", "--folds", "2", "--seed", "7", as_json=True)
        cv2 = run(runner, proj, "cv", ds_id, "--algo", "knn", "--folds", "2", "--seed", "7", as_json=True)
        b1, b2 = json.loads(cv1.output), json.loads(cv2.output)
        for key in ("fold_accuracies", "mean_accuracy", "t_statistic", "p_value"):
            assert b1[key] == b2[key]

        km = run(runner, proj, "kmeans", ds_id, "--k", "2", "--seed", "3", as_json=True)
        body = json.loads(km.output)
        assert len(body["centroids"]) == 2

        model = tmp_path / "model.json"
        run(runner, proj, "train", ds_id, "--algo", "knn", "--knn-k", "1", "--out", str(model))
        palette = tile_palette()
        rng = np.random.default_rng(9)
        noisy = write_png(
            tmp_path / "query.png",
            compose_image({"constant": 0.05, "stripes": 0.05, "checker": 0.1, "noise": 0.8}, 2, 2, rng, palette),
        )
        result = run(runner, proj, "classify", noisy, "--model", str(model))
        assert result.output.strip() in ("0", "1")

    def test_extract_audit_writes_trail(self, runner, tmp_path, full_project):
        proj, ids = full_project
        out = run(runner, proj, "extract", "--audit", as_json=True)
        ds_id = json.loads(out.output)["dataset_id"]
        trails = list((proj / "datasets").glob(f"{ds_id}.*.audit.jsonl"))
        assert len(trails) == 12  # 8 composites + 4 masters
        rec = json.loads(trails[0].read_text().splitlines()[0])
        assert set(rec) == {"index", "aggregates", "chosen"}
