import json

import numpy as np
import pytest

from planted import planted_prototypes
from uidlearn.prototypes import (
    DistanceMatrix,
    PrototypeSet,
    cut_clusters,
    distance_matrix,
    hierarchical_cluster,
    purity_check,
)


def block_matrix(block_sizes, within=0.1, between=0.9):
    labels = []
    for bi, size in enumerate(block_sizes):
        labels += [f"b{bi}x{j}" for j in range(size)]
    n = len(labels)
    values = np.full((n, n), between)
    start = 0
    for size in block_sizes:
        values[start : start + size, start : start + size] = within
        start += size
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(labels=labels, values=values)


class TestDistanceMatrix:
    def test_twelve_prototypes_give_12x12(self):
        ps = planted_prototypes()
        h = distance_matrix(ps)
        assert h.values.shape == (12, 12)
        assert h.labels == [p.id for p in ps.prototypes]

    def test_identical_prototypes_symmetric_entry(self):
        ps = planted_prototypes()
        sub = PrototypeSet(categories=ps.categories, prototypes=[ps.prototypes[0], ps.prototypes[0]])
        h = distance_matrix(sub)
        sym = h.symmetrized()
        assert sym[0, 1] == sym[1, 0]

    def test_recomputation_identical(self):
        ps = planted_prototypes()
        a = distance_matrix(ps)
        b = distance_matrix(ps)
        assert np.array_equal(a.values, b.values)

    def test_too_few_prototypes(self):
        ps = planted_prototypes()
        with pytest.raises(ValueError):
            distance_matrix(PrototypeSet(categories=ps.categories, prototypes=ps.prototypes[:1]))


class TestHierarchicalCluster:
    def test_two_block_root_split(self):
        h = block_matrix([3, 3])
        dend = hierarchical_cluster(h)
        a, b = dend.root.children
        groups = {frozenset(dend.labels[i] for i in a.members), frozenset(dend.labels[i] for i in b.members)}
        assert groups == {frozenset(h.labels[:3]), frozenset(h.labels[3:])}

    def test_two_leaves_merge_at_distance(self):
        h = block_matrix([1, 1], between=0.42)
        dend = hierarchical_cluster(h)
        assert dend.root.height == pytest.approx(0.42)

    def test_heights_monotone(self):
        ps = planted_prototypes()
        dend = hierarchical_cluster(distance_matrix(ps))
        heights = [m.height for m in dend.merges]
        assert heights == sorted(heights)

    def test_linkage_options(self):
        h = block_matrix([2, 2])
        for linkage in ("average", "single", "complete"):
            dend = hierarchical_cluster(h, linkage=linkage)
            assert len(dend.merges) == 3
        with pytest.raises(ValueError):
            hierarchical_cluster(h, linkage="ward")


class TestCutClusters:
    def test_single_cluster(self):
        dend = hierarchical_cluster(block_matrix([2, 2]))
        assert cut_clusters(dend, 1) == [dend.labels]

    def test_singletons(self):
        dend = hierarchical_cluster(block_matrix([2, 2]))
        assert cut_clusters(dend, 4) == [[l] for l in dend.labels]

    def test_planted_blocks_recovered(self):
        h = block_matrix([3, 3, 3, 3])
        dend = hierarchical_cluster(h)
        part = cut_clusters(dend, 4)
        assert {frozenset(g) for g in part} == {
            frozenset(h.labels[i : i + 3]) for i in range(0, 12, 3)
        }

    def test_out_of_range(self):
        dend = hierarchical_cluster(block_matrix([2, 2]))
        with pytest.raises(ValueError):
            cut_clusters(dend, 0)
        with pytest.raises(ValueError):
            cut_clusters(dend, 5)


class TestPurity:
    def test_planted_prototypes_pure(self):
        ps = planted_prototypes()
        dend = hierarchical_cluster(distance_matrix(ps))
        part = cut_clusters(dend, 4)
        report = purity_check(part, ps)
        assert report.pure
        assert report.offending == []

    def test_swapped_prototype_reported(self):
        ps = planted_prototypes()
        groups = [[p.id for p in ps.by_category(c)] for c in ps.categories]
        groups[0][0], groups[1][0] = groups[1][0], groups[0][0]
        report = purity_check(groups, ps)
        assert not report.pure
        assert set(report.offending) == {"p01", "p04"}

    def test_invariant_under_cluster_relabeling(self):
        ps = planted_prototypes()
        groups = [[p.id for p in ps.by_category(c)] for c in ps.categories]
        assert purity_check(groups, ps).pure
        assert purity_check(list(reversed(groups)), ps).pure

    def test_partition_must_cover(self):
        ps = planted_prototypes()
        with pytest.raises(ValueError):
            purity_check([["p01"]], ps)


class TestExports:
    def test_dendrogram_json(self):
        ps = planted_prototypes()
        dend = hierarchical_cluster(distance_matrix(ps))
        obj = dend.to_dict()
        assert obj["labels"] == dend.labels
        text = json.dumps(obj)
        assert all(p.id in text for p in ps.prototypes)

    def test_newick_terminates(self):
        dend = hierarchical_cluster(block_matrix([2, 2]))
        nwk = dend.to_newick()
        assert nwk.endswith(";")
        assert nwk.count("(") == nwk.count(")")


def test_window_size_componentwise_maximum():
    ps = planted_prototypes()
    assert ps.window_size() == (45, 17)
