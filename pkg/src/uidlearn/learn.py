"""Supervised and unsupervised learning over feature-vector datasets.

Bundled learners: ZeroR (majority baseline), Gaussian naive Bayes, and
k-nearest-neighbours.  The cross-validation harness runs a learner and
the ZeroR baseline on identical stratified folds and compares them with
a paired two-tailed t-test; k-means produces centroid profiles per
cluster.  All stochastic steps are driven by explicit seeds and are
bit-reproducible.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .features import Dataset, DatasetRow, FeatureVector, feature_vector
from .imaging import RgbImage
from .prototypes import PrototypeSet

ALGORITHMS = ("zero_r", "naive_bayes", "knn")

_VAR_FLOOR = 1e-9  # survives constant features (components are often exactly 0)


@dataclass
class TrainedClassifier:
    algorithm: str
    classes: list[str]
    dim: int
    params: dict

    def to_json(self) -> str:
        return json.dumps(
            {"algorithm": self.algorithm, "classes": self.classes, "dim": self.dim, "params": self.params},
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TrainedClassifier":
        obj = json.loads(text)
        return cls(algorithm=obj["algorithm"], classes=obj["classes"], dim=obj["dim"], params=obj["params"])


def train(algorithm: str, rows: Sequence[DatasetRow], knn_k: int = 3) -> TrainedClassifier:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    rows = list(rows)
    if not rows:
        raise ValueError("no training rows")
    if any(r.label is None for r in rows):
        raise ValueError("training rows must be labeled")
    classes = sorted({r.label for r in rows})
    dim = len(rows[0].vector.counts)

    if algorithm == "zero_r":
        counts = {c: 0 for c in classes}
        for r in rows:
            counts[r.label] += 1
        majority = min(classes, key=lambda c: (-counts[c], c))
        params = {"majority": majority}
    elif algorithm == "naive_bayes":
        params = {"stats": {}}
        for c in classes:
            vecs = np.array([r.vector.values for r in rows if r.label == c], dtype=np.float64)
            params["stats"][c] = {
                "prior": len(vecs) / len(rows),
                "mean": vecs.mean(axis=0).tolist(),
                "var": np.maximum(vecs.var(axis=0), _VAR_FLOOR).tolist(),
            }
    else:
        params = {
            "k": knn_k,
            "points": [list(r.vector.values) for r in rows],
            "labels": [r.label for r in rows],
        }
    return TrainedClassifier(algorithm=algorithm, classes=classes, dim=dim, params=params)


def predict(clf: TrainedClassifier, v: FeatureVector | Sequence[float]) -> str:
    x = list(v.values) if isinstance(v, FeatureVector) else list(v)
    if len(x) != clf.dim:
        raise ValueError(f"vector dimension {len(x)} != training dimension {clf.dim}")

    if clf.algorithm == "zero_r":
        return clf.params["majority"]

    if clf.algorithm == "naive_bayes":
        best_label, best_score = None, -math.inf
        for c in sorted(clf.params["stats"]):  # sorted order makes ties pick the smallest label
            st = clf.params["stats"][c]
            score = math.log(st["prior"])
            for xi, mu, var in zip(x, st["mean"], st["var"]):
                score += -0.5 * math.log(2 * math.pi * var) - (xi - mu) ** 2 / (2 * var)
            if score > best_score:
                best_label, best_score = c, score
        return best_label

    k = clf.params["k"]
    pts = clf.params["points"]
    dists = sorted(
        (sum((a - b) ** 2 for a, b in zip(x, p)), idx) for idx, p in enumerate(pts)
    )
    votes: dict[str, int] = {}
    for _, idx in dists[:k]:
        lbl = clf.params["labels"][idx]
        votes[lbl] = votes.get(lbl, 0) + 1
    return min(votes, key=lambda c: (-votes[c], c))


@dataclass
class CvReport:
    algorithm: str
    folds: int
    seed: int
    fold_accuracies: list[float]  # percent
    baseline_accuracies: list[float]  # percent, ZeroR on identical folds
    t_statistic: float
    p_value: float
    alpha: float
    significant: bool

    @property
    def mean_accuracy(self) -> float:
        return sum(self.fold_accuracies) / len(self.fold_accuracies)

    @property
    def baseline_mean_accuracy(self) -> float:
        return sum(self.baseline_accuracies) / len(self.baseline_accuracies)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "folds": self.folds,
            "seed": self.seed,
            "fold_accuracies": self.fold_accuracies,
            "baseline_accuracies": self.baseline_accuracies,
            "mean_accuracy": self.mean_accuracy,
            "baseline_mean_accuracy": self.baseline_mean_accuracy,
            "t_statistic": self.t_statistic,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "significant": self.significant,
        }

    def render_table(self) -> str:
        marker = " o" if self.significant and self.mean_accuracy > self.baseline_mean_accuracy else ""
        lines = [
            f"{'Dataset':<24}{'baseline':>10}  {self.algorithm:>12}",
            f"{'accuracy %':<24}{self.baseline_mean_accuracy:>10.2f}  {self.mean_accuracy:>12.2f}{marker}",
            "",
            "o  statistically significant improvement"
            f" (paired t-test, alpha={self.alpha})",
        ]
        return "\n".join(lines)


def stratified_folds(rows: Sequence[DatasetRow], n: int, seed: int) -> list[list[int]]:
    """Deterministic stratified fold assignment; returns row indices per fold."""
    if n < 2:
        raise ValueError("need at least 2 folds")
    by_class: dict[str, list[int]] = {}
    for idx, r in enumerate(rows):
        by_class.setdefault(r.label, []).append(idx)
    rng = random.Random(seed)
    folds: list[list[int]] = [[] for _ in range(n)]
    for c in sorted(by_class):
        members = by_class[c]
        if len(members) < n:
            raise ValueError(f"class {c!r} has {len(members)} rows, fewer than {n} folds")
        rng.shuffle(members)
        for pos, idx in enumerate(members):
            folds[pos % n].append(idx)
    return [sorted(f) for f in folds]


def _accuracy(clf: TrainedClassifier, rows: Sequence[DatasetRow]) -> float:
    hits = sum(1 for r in rows if predict(clf, r.vector) == r.label)
    return 100.0 * hits / len(rows)


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-tailed paired t-test statistic and p-value for mean(a-b) != 0."""
    n = len(a)
    diffs = [x - y for x, y in zip(a, b)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0:
        if mean == 0:
            return 0.0, 1.0
        return math.copysign(math.inf, mean), 0.0
    t = mean / math.sqrt(var / n)
    p = 2 * stats.t.sf(abs(t), n - 1)
    return t, float(p)


def cross_validate(
    ds: Dataset, algorithm: str, n: int = 10, seed: int = 0, alpha: float = 0.05, knn_k: int = 3
) -> CvReport:
    if not ds.labeled():
        raise ValueError("cross-validation needs a labeled dataset")
    folds = stratified_folds(ds.rows, n, seed)
    accs, base_accs = [], []
    for fold in folds:
        test = [ds.rows[i] for i in fold]
        train_rows = [r for i, r in enumerate(ds.rows) if i not in set(fold)]
        accs.append(_accuracy(train(algorithm, train_rows, knn_k=knn_k), test))
        base_accs.append(_accuracy(train("zero_r", train_rows), test))
    t, p = paired_t_test(accs, base_accs)
    return CvReport(
        algorithm=algorithm,
        folds=n,
        seed=seed,
        fold_accuracies=accs,
        baseline_accuracies=base_accs,
        t_statistic=t,
        p_value=p,
        alpha=alpha,
        significant=p < alpha,
    )


@dataclass
class ClusterReport:
    k: int
    seed: int
    assignments: list[int]
    centroids: list[list[float]]
    categories: list[str]
    inertia: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "assignments": self.assignments,
            "centroids": self.centroids,
            "categories": self.categories,
            "inertia": self.inertia,
        }

    def render_table(self) -> str:
        """Feature-by-cluster grid: full-data mean plus one column per cluster."""
        n = len(self.assignments)
        full = [sum(c[j] for c in self._points) / n for j in range(len(self.categories))]
        header = f"{'Feature':<12}{'Full data':>12}" + "".join(
            f"{'Cluster#' + str(i + 1):>12}" for i in range(self.k)
        )
        lines = [header]
        for j, cat in enumerate(self.categories):
            cells = "".join(f"{self.centroids[i][j]:>12.4f}" for i in range(self.k))
            lines.append(f"{cat:<12}{full[j]:>12.4f}" + cells)
        return "\n".join(lines)

    _points: list[list[float]] = field(default_factory=list, repr=False)


def kmeans(ds: Dataset, k: int, seed: int = 0, max_iter: int = 300) -> ClusterReport:
    """Seeded k-means++ followed by Lloyd's iterations on the feature columns."""
    pts = [list(r.vector.values) for r in ds.rows]
    n = len(pts)
    if k > n:
        raise ValueError(f"k={k} exceeds row count {n}")
    rng = random.Random(seed)
    dim = len(pts[0])

    def d2(a: Sequence[float], b: Sequence[float]) -> float:
        return sum((x - y) ** 2 for x, y in zip(a, b))

    centroids = [list(pts[rng.randrange(n)])]
    while len(centroids) < k:
        dists = [min(d2(p, c) for c in centroids) for p in pts]
        total = sum(dists)
        if total == 0:
            centroids.append(list(pts[rng.randrange(n)]))
            continue
        r = rng.random() * total
        acc = 0.0
        for p, d in zip(pts, dists):
            acc += d
            if acc >= r:
                centroids.append(list(p))
                break

    assign = [-1] * n
    for _ in range(max_iter):
        new_assign = [min(range(k), key=lambda j: (d2(p, centroids[j]), j)) for p in pts]
        if new_assign == assign:
            break
        assign = new_assign
        for j in range(k):
            members = [pts[i] for i in range(n) if assign[i] == j]
            if members:
                centroids[j] = [sum(col) / len(members) for col in zip(*members)]
            else:
                centroids[j] = list(pts[rng.randrange(n)])

    inertia = sum(d2(p, centroids[a]) for p, a in zip(pts, assign))
    report = ClusterReport(
        k=k,
        seed=seed,
        assignments=assign,
        centroids=[list(c) for c in centroids],
        categories=list(ds.categories),
        inertia=inertia,
    )
    report._points = pts
    return report


def classify_image(img: RgbImage, ps: PrototypeSet, clf: TrainedClassifier) -> str:
    """Deployed classifier: predict the class of an image from its
    feature vector."""
    return predict(clf, feature_vector(img, ps))
