"""Feature categories, prototype crops, the pairwise UID matrix, and
agglomerative clustering with the purity termination check.

The human picks the prototypes (UI/CLI); this module supplies every
computational step of the selection loop: the L x L distance matrix,
average-linkage clustering of its symmetrization, the dendrogram cut
into M groups, and the check that the M clusters coincide with the
user's category grouping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .imaging import GrayImage, PixelRect
from .strdist import ComplexityCachedString
from .uid import uid_cached


@dataclass(frozen=True)
class FeatureCategory:
    index: int
    name: str


@dataclass
class Prototype:
    id: str
    category: str
    source_image_id: str
    rect: PixelRect
    string: ComplexityCachedString
    gray: Optional[GrayImage] = None


@dataclass
class PrototypeSet:
    categories: list[str] = field(default_factory=list)
    prototypes: list[Prototype] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.prototypes)

    def by_category(self, name: str) -> list[Prototype]:
        return [p for p in self.prototypes if p.category == name]

    def validate_for_extraction(self) -> None:
        if not self.categories:
            raise ValueError("no feature categories defined")
        empty = [c for c in self.categories if not self.by_category(c)]
        if empty:
            raise ValueError(f"categories without prototypes: {', '.join(empty)}")

    def window_size(self) -> tuple[int, int]:
        """Scan window extents: componentwise maximum over all prototypes."""
        if not self.prototypes:
            raise ValueError("no prototypes")
        w = max(p.rect.width for p in self.prototypes)
        h = max(p.rect.height for p in self.prototypes)
        return w, h


@dataclass
class DistanceMatrix:
    labels: list[str]
    values: np.ndarray  # (L, L) float64, entry (k, l) = UID(P_k, P_l)

    def symmetrized(self) -> np.ndarray:
        return (self.values + self.values.T) / 2.0


def distance_matrix(ps: PrototypeSet) -> DistanceMatrix:
    protos = ps.prototypes
    n = len(protos)
    if n < 2:
        raise ValueError("need at least two prototypes to build a distance matrix")
    values = np.empty((n, n), dtype=np.float64)
    for k, a in enumerate(protos):
        for l, b in enumerate(protos):
            values[k, l] = uid_cached(a.string, b.string).value
    return DistanceMatrix(labels=[p.id for p in protos], values=values)


@dataclass
class DendrogramNode:
    height: float
    leaf: Optional[int] = None  # leaf index when a leaf
    children: Optional[tuple["DendrogramNode", "DendrogramNode"]] = None
    members: tuple[int, ...] = ()

    def is_leaf(self) -> bool:
        return self.leaf is not None


@dataclass
class Dendrogram:
    labels: list[str]
    root: DendrogramNode
    merges: list[DendrogramNode]  # internal nodes in merge order (heights nondecreasing)

    def to_dict(self) -> dict:
        def conv(node: DendrogramNode) -> dict:
            if node.is_leaf():
                return {"leaf": self.labels[node.leaf], "height": 0.0}
            a, b = node.children
            return {"height": node.height, "children": [conv(a), conv(b)]}

        return {"labels": list(self.labels), "tree": conv(self.root)}

    def to_newick(self) -> str:
        def conv(node: DendrogramNode, parent_height: float) -> str:
            blen = max(parent_height - node.height, 0.0)
            if node.is_leaf():
                return f"{self.labels[node.leaf]}:{blen:.6g}"
            a, b = node.children
            inner = ",".join(conv(c, node.height) for c in node.children)
            return f"({inner}):{blen:.6g}"

        return conv(self.root, self.root.height) + ";"


LINKAGES = ("average", "single", "complete")


def hierarchical_cluster(h: DistanceMatrix, linkage: str = "average") -> Dendrogram:
    """Agglomerative clustering over the symmetrized matrix.

    Merge ties are broken by the lexicographically smallest pair of
    cluster labels, a cluster's label being its smallest leaf index;
    results are therefore identical across platforms.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}")
    dist = h.symmetrized()
    n = len(h.labels)
    if n < 2:
        raise ValueError("need at least two leaves")

    nodes = {i: DendrogramNode(height=0.0, leaf=i, members=(i,)) for i in range(n)}
    sizes = {i: 1 for i in range(n)}
    d = {}
    for i in range(n):
        for j in range(i + 1, n):
            d[(i, j)] = dist[i, j]
    active = sorted(nodes)
    merges: list[DendrogramNode] = []
    next_id = n

    while len(active) > 1:
        best = None
        for ai in range(len(active)):
            for bi in range(ai + 1, len(active)):
                i, j = active[ai], active[bi]
                key = (d[(min(i, j), max(i, j))], min(nodes[i].members[0], nodes[j].members[0]),
                       max(nodes[i].members[0], nodes[j].members[0]))
                if best is None or key < best[0]:
                    best = (key, i, j)
        (height, _, _), i, j = best
        merged = DendrogramNode(
            height=float(height),
            children=(nodes[i], nodes[j]),
            members=tuple(sorted(nodes[i].members + nodes[j].members)),
        )
        for k in active:
            if k in (i, j):
                continue
            dik = d[(min(i, k), max(i, k))]
            djk = d[(min(j, k), max(j, k))]
            if linkage == "average":
                new = (sizes[i] * dik + sizes[j] * djk) / (sizes[i] + sizes[j])
            elif linkage == "single":
                new = min(dik, djk)
            else:
                new = max(dik, djk)
            d[(min(next_id, k), max(next_id, k))] = new
        nodes[next_id] = merged
        sizes[next_id] = sizes[i] + sizes[j]
        active = [k for k in active if k not in (i, j)] + [next_id]
        merges.append(merged)
        next_id += 1

    return Dendrogram(labels=list(h.labels), root=merges[-1], merges=merges)


def cut_clusters(dendrogram: Dendrogram, m: int) -> list[list[str]]:
    """Partition induced by removing the m-1 highest merges.

    Returned groups are lists of leaf labels; groups and members are in
    deterministic (smallest leaf index) order.
    """
    n = len(dendrogram.labels)
    if not 1 <= m <= n:
        raise ValueError(f"cluster count {m} outside [1, {n}]")
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for node in dendrogram.merges[: n - m]:
        a, b = node.children
        ra, rb = find(a.members[0]), find(b.members[0])
        parent[max(ra, rb)] = min(ra, rb)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [[dendrogram.labels[i] for i in groups[r]] for r in sorted(groups)]


@dataclass
class PurityReport:
    pure: bool
    offending: list[str]
    cluster_majorities: list[str]

    def to_dict(self) -> dict:
        return {
            "pure": self.pure,
            "offending": list(self.offending),
            "cluster_majorities": list(self.cluster_majorities),
        }


def purity_check(partition: list[list[str]], ps: PrototypeSet) -> PurityReport:
    """Whether the partition equals the grouping by category label.

    A false verdict names the prototypes that disagree with their
    cluster's majority category, to drive reselection.
    """
    category_of = {p.id: p.category for p in ps.prototypes}
    ids = sorted(category_of)
    got = sorted(pid for grp in partition for pid in grp)
    if got != ids:
        raise ValueError("partition does not cover exactly the prototype ids")

    majorities: list[str] = []
    offending: list[str] = []
    for grp in partition:
        counts: dict[str, int] = {}
        for pid in grp:
            counts[category_of[pid]] = counts.get(category_of[pid], 0) + 1
        majority = min(counts, key=lambda c: (-counts[c], c))
        majorities.append(majority)
        offending.extend(pid for pid in grp if category_of[pid] != majority)

    target = {frozenset(p.id for p in ps.by_category(c)) for c in ps.categories}
    actual = {frozenset(grp) for grp in partition}
    pure = actual == target
    if not pure and not offending:
        # e.g. one category split across clusters: flag the smaller shards
        seen: dict[str, int] = {}
        for grp, maj in zip(partition, majorities):
            if maj in seen:
                offending.extend(grp)
            else:
                seen[maj] = 1
    return PurityReport(pure=pure, offending=sorted(set(offending)), cluster_majorities=majorities)
