"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured numbers."""

import json
import os
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from planted import (
    KINDS,
    archetype_corpus,
    compose_image,
    planted_prototypes,
    supervised_corpus,
    tile_palette,
)
from uidlearn.complexity import exhaustive_history, lz76_complexity, reference_complexity, reference_history
from uidlearn.features import build_dataset, feature_vector, to_json
from uidlearn.imaging import tile_windows, to_grayscale
from uidlearn.learn import cross_validate, kmeans
from uidlearn.prototypes import cut_clusters, distance_matrix, hierarchical_cluster, purity_check
from uidlearn.strdist import d_star_star
from uidlearn.uid import uid


def report(line: str) -> None:
    print(f"\nPASS: {line}")


def test_lz76_ground_truth():
    lz76_complexity("warmup")  # exclude import/warm effects from the timing
    start = time.perf_counter()
    h = exhaustive_history("aacgtacc")
    elapsed = time.perf_counter() - start
    assert h.complexity == 5
    assert h.components == ((1, 1), (2, 3), (4, 4), (5, 5), (6, 8))
    assert elapsed < 1e-3
    report(f"LZ76 ground truth: c=5, boundaries a.ac.g.t.acc, {elapsed * 1e6:.0f} us")


def test_parser_oracle_equivalence():
    rng = random.Random(20260823)
    cases = 10_000
    start = time.perf_counter()
    for i in range(cases):
        k = (2, 4, 26, 256)[i % 4]
        n = rng.randrange(0, 513)
        s = bytes(rng.randrange(k) for _ in range(n))
        assert exhaustive_history(s).components == reference_history(s).components
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    report(f"parser oracle equivalence: {cases} strings (len<=512, |A| in 2/4/26/256), {elapsed:.1f} s")


def test_d_star_star_exactness():
    rng = random.Random(17)
    pairs = 1000
    start = time.perf_counter()
    for _ in range(pairs):
        x = bytes(rng.randrange(16) for _ in range(rng.randrange(1, 200)))
        y = bytes(rng.randrange(16) for _ in range(rng.randrange(1, 200)))
        cx, cy, cxy = reference_complexity(x), reference_complexity(y), reference_complexity(x + y)
        expected = float(Fraction(cxy - min(cx, cy), max(cx, cy)))
        assert d_star_star(x, y) == expected
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    report(f"d** bit-exact vs independently parsed complexities on {pairs} pairs, {elapsed:.1f} s")


def test_grayscale_formula():
    def oracle(r, g, b):
        val = Fraction(2989 * r + 5870 * g + 1140 * b, 10_000)
        floor = val.numerator // val.denominator
        return min(floor + (1 if val - floor >= Fraction(1, 2) else 0), 255)

    levels = (0, 1, 127, 128, 254, 255)
    triples = [(r, g, b) for r in levels for g in levels for b in levels]
    rng = random.Random(5)
    triples += [(rng.randrange(256), rng.randrange(256), rng.randrange(256)) for _ in range(200)]
    start = time.perf_counter()
    arr = np.array(triples, dtype=np.uint8).reshape(1, -1, 3)
    got = to_grayscale(arr)[0]
    for (r, g, b), v in zip(triples, got):
        assert v == oracle(r, g, b)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(f"grayscale round-half-away formula exact on {len(triples)} triples, {elapsed * 1e3:.0f} ms")


def test_tiling_count():
    img = np.zeros((1364, 670), np.uint8)
    tiles = tile_windows(img, 45, 17)
    assert len(tiles) == 1120
    report("tiling: 670x1364 image with 45x17 window gives exactly 1120 tiles")


def test_simplex_invariant():
    ps = planted_prototypes()
    palette = tile_palette()
    rng = np.random.default_rng(99)
    for _ in range(50):
        mix = dict(zip(KINDS, rng.dirichlet(np.ones(4))))
        img = compose_image(mix, 3, 4, rng, palette)
        fv = feature_vector(img, ps)
        assert all(c >= 0 for c in fv.counts)
        assert sum(fv.exact_values()) == Fraction(1)
    report("simplex invariant: 50 synthetic images, components >= 0 and rational sum exactly 1")


def test_prototype_selection_synthetic():
    start = time.perf_counter()
    ps = planted_prototypes()
    h = distance_matrix(ps)
    dend = hierarchical_cluster(h, linkage="average")
    partition = cut_clusters(dend, 4)
    verdict = purity_check(partition, ps)
    elapsed = time.perf_counter() - start
    assert verdict.pure
    assert elapsed < 30.0
    report(f"planted prototype selection: average-linkage cut at 4 is PURE, {elapsed:.1f} s")


@pytest.fixture(scope="module")
def supervised_dataset():
    ps = planted_prototypes()
    corpus, labels = supervised_corpus(n=60)
    return build_dataset(corpus, ps, labels=labels, target="humidity")


def test_end_to_end_supervised(supervised_dataset):
    start = time.perf_counter()
    ds = supervised_dataset
    nb = cross_validate(ds, "naive_bayes", n=10, seed=1)
    kn = cross_validate(ds, "knn", n=10, seed=1)
    elapsed = time.perf_counter() - start
    for rep in (nb, kn):
        assert rep.mean_accuracy >= 80.0
        assert rep.baseline_mean_accuracy <= 55.0
        assert rep.significant and rep.mean_accuracy > rep.baseline_mean_accuracy
    assert elapsed < 600.0
    report(
        "end-to-end supervised: naive_bayes "
        f"{nb.mean_accuracy:.1f}%, knn {kn.mean_accuracy:.1f}% vs baseline "
        f"{nb.baseline_mean_accuracy:.1f}%, both significant at 0.05"
    )


def test_end_to_end_unsupervised():
    from sklearn.metrics import adjusted_rand_score

    ps = planted_prototypes()
    corpus, planted = archetype_corpus(n=24)
    ds = build_dataset(corpus, ps)
    start = time.perf_counter()
    scores = []
    for seed in range(5):
        rep = kmeans(ds, 3, seed=seed)
        scores.append(adjusted_rand_score(planted, rep.assignments))
    elapsed = time.perf_counter() - start
    assert all(s >= 0.8 for s in scores)
    table = kmeans(ds, 3, seed=0).render_table()
    lines = table.splitlines()
    assert "Full data" in lines[0] and "Cluster#3" in lines[0]
    assert len(lines) == 5
    assert elapsed < 300.0
    report(f"end-to-end unsupervised: ARI per seed {['%.2f' % s for s in scores]}, table renders")


def test_pipeline_determinism(tmp_path):
    ps = planted_prototypes()
    corpus, labels = supervised_corpus(n=12, cols=2, rows=3)

    def run_once():
        ds = build_dataset(corpus, ps, labels=labels, target="humidity")
        cv = cross_validate(ds, "naive_bayes", n=2, seed=42)
        km = kmeans(ds, 3, seed=42)
        blob = to_json(ds) + json.dumps(cv.to_dict(), sort_keys=True) + json.dumps(km.to_dict(), sort_keys=True)
        return blob.encode()

    assert run_once() == run_once()
    report("determinism: extract -> cv -> kmeans byte-identical across two seeded runs")


def test_performance_budget():
    rng = np.random.default_rng(1)
    a = rng.integers(0, 256, (17, 45, 3)).astype(np.uint8)
    b = rng.integers(0, 256, (17, 45, 3)).astype(np.uint8)
    uid(a, b)  # warm
    start = time.perf_counter()
    uid(a, b)
    per_uid = time.perf_counter() - start
    assert per_uid < 5e-3

    ps = planted_prototypes()
    big = rng.integers(0, 256, (1364, 670)).astype(np.uint8)  # worst case: nothing repeats
    start = time.perf_counter()
    fv = feature_vector(big, ps, workers=1)
    single = time.perf_counter() - start
    assert fv.total == 1120
    assert single < 60.0
    report(f"performance: UID(45x17, 45x17) {per_uid * 1e3:.2f} ms; 670x1364 extraction {single:.1f} s single-threaded")

    if (os.cpu_count() or 1) < 4:
        pytest.skip(f"speedup check needs >=4 CPUs, host has {os.cpu_count()}")
    start = time.perf_counter()
    fv4 = feature_vector(big, ps, workers=4)
    quad = time.perf_counter() - start
    assert fv4 == fv
    assert single / quad >= 2.0
    report(f"performance: 4-worker speedup {single / quad:.1f}x")
