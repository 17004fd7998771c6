"""Normalized mutual information between taxonomy categories."""

import numpy as np
import pytest

from taxonomy_forge.records import CategoryAnnotation, DocumentRecord
from taxonomy_forge.redundancy import (
    DEFAULT_NMI_EXCLUSIONS,
    ContingencyTable,
    is_degenerate,
    joint_counts,
    mean_nmi,
    nmi,
    pairwise_nmi,
)

from oracles import brute_nmi


def table(counts) -> ContingencyTable:
    counts = np.asarray(counts)
    return ContingencyTable(
        tuple(f"r{i}" for i in range(counts.shape[0])),
        tuple(f"c{j}" for j in range(counts.shape[1])),
        counts)


class TestContingencyTable:
    def test_validation(self):
        with pytest.raises(ValueError):
            table([[1, -1], [0, 0]])
        with pytest.raises(ValueError):
            table([[0, 0], [0, 0]])
        with pytest.raises(ValueError):
            ContingencyTable(("a",), ("b", "c"), np.ones((2, 2), dtype=int))

    def test_from_pairs(self):
        t = ContingencyTable.from_pairs(
            [("x", "1"), ("x", "1"), ("y", "2"), ("x", "2")])
        assert t.row_labels == ("x", "y")
        assert t.col_labels == ("1", "2")
        assert t.counts.tolist() == [[2, 1], [0, 1]]
        assert t.total == 4

    def test_transpose_preserves_nmi(self):
        t = table([[5, 1], [2, 7]])
        assert nmi(t.transpose()) == pytest.approx(nmi(t), abs=1e-12)

    def test_merge_aligns_labels(self):
        a = ContingencyTable.from_pairs([("x", "1"), ("y", "2")])
        b = ContingencyTable.from_pairs([("y", "2"), ("z", "3")])
        merged = a.merge(b)
        assert merged.row_labels == ("x", "y", "z")
        assert merged.col_labels == ("1", "2", "3")
        assert merged.total == 4
        assert merged.counts[1, 1] == 2


class TestNmi:
    def test_permutation_is_one(self):
        assert nmi(table([[2, 0], [0, 2]])) == pytest.approx(1.0)
        assert nmi(table([[0, 3], [5, 0]])) == pytest.approx(1.0)

    def test_independence_is_zero(self):
        assert nmi(table([[5, 5], [5, 5]])) == pytest.approx(0.0, abs=1e-12)
        assert nmi(table([[2, 4], [1, 2]])) == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_constant_pair(self):
        t = table([[9]])
        assert nmi(t) == 0.0
        assert is_degenerate(t)
        assert not is_degenerate(table([[2, 0], [0, 2]]))
        # One constant margin is not degenerate: entropy remains.
        assert not is_degenerate(table([[3, 4]]))

    def test_range_and_symmetry_random(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            t = rng.integers(0, 9, size=(int(rng.integers(1, 6)),
                                         int(rng.integers(1, 6))))
            if t.sum() == 0:
                continue
            v = nmi(table(t))
            assert 0.0 <= v <= 1.0 + 1e-12
            assert v == pytest.approx(nmi(table(t.T)), abs=1e-12)

    def test_matches_direct_evaluation(self):
        rng = np.random.default_rng(17)
        cases = [np.array([[2, 0], [0, 2]]), np.array([[5, 5], [5, 5]]),
                 np.array([[3, 1, 0], [0, 2, 4]])]
        while len(cases) < 60:
            t = rng.integers(0, 12, size=(int(rng.integers(1, 6)),
                                          int(rng.integers(1, 6))))
            if t.sum() > 0:
                cases.append(t)
        for t in cases:
            assert nmi(table(t)) == pytest.approx(brute_nmi(t), abs=1e-9)


class TestMeanNmi:
    def test_exclusions_apply_to_both_sides(self):
        tables = {
            ("a", "b"): table([[2, 0], [0, 2]]),
            ("a", "fdc_level_1"): table([[5, 5], [5, 5]]),
            ("doc_type_v2", "b"): table([[5, 5], [5, 5]]),
        }
        assert mean_nmi(tables) == pytest.approx(1.0)
        assert mean_nmi(tables, exclusions=frozenset()) == pytest.approx(1 / 3)

    def test_all_excluded_raises(self):
        tables = {("fdc_level_1", "fdc_level_2"): table([[1]])}
        with pytest.raises(ValueError):
            mean_nmi(tables)

    def test_default_exclusions(self):
        assert DEFAULT_NMI_EXCLUSIONS == {
            "doc_type_v2", "fdc_level_1", "fdc_level_2"}


def _record(i, fdc=None, depth=None, doc_type=None):
    ann = {}
    if fdc is not None:
        ann["fdc"] = CategoryAnnotation(primary=fdc)
    if depth is not None:
        ann["reasoning_depth"] = CategoryAnnotation(primary=depth)
    if doc_type is not None:
        ann["doc_type_v1"] = CategoryAnnotation(primary=doc_type)
    return DocumentRecord(text=f"doc {i}", annotations=ann)


class TestCorpusWiring:
    def test_joint_counts_skips_unlabeled(self):
        records = [
            _record(0, fdc="512", depth="3"),
            _record(1, fdc="005", depth="1"),
            _record(2, fdc="512"),
            _record(3, depth="1"),
        ]
        t, skipped = joint_counts(records, "fdc_level_3", "reasoning_depth")
        assert skipped == 2
        assert t.total == 2

    def test_joint_counts_raises_without_overlap(self):
        records = [_record(0, fdc="512"), _record(1, depth="3")]
        with pytest.raises(ValueError):
            joint_counts(records, "fdc_level_3", "reasoning_depth")

    def test_pairwise_nmi_reports(self):
        records = [
            _record(0, fdc="512", depth="3", doc_type="1"),
            _record(1, fdc="005", depth="1", doc_type="1"),
            _record(2, fdc="512", depth="3", doc_type="1"),
            _record(3, fdc="005", depth="1", doc_type="1"),
        ]
        cats = ("fdc_level_3", "reasoning_depth", "doc_type_v1")
        reports = {(r.category_a, r.category_b): r
                   for r in pairwise_nmi(records, cats)}
        assert len(reports) == 3
        # fdc and depth are a relabeling of each other here.
        perfect = reports[("fdc_level_3", "reasoning_depth")]
        assert perfect.value == pytest.approx(1.0)
        assert perfect.n_used == 4 and perfect.n_skipped == 0
        # doc_type is constant: both pairs touching it are degenerate
        # in one margin but still defined.
        assert reports[("fdc_level_3", "doc_type_v1")].value is not None

    def test_pairwise_nmi_empty_pair_is_none(self):
        records = [_record(0, fdc="512"), _record(1, depth="3")]
        cats = ("fdc_level_3", "reasoning_depth")
        (report,) = pairwise_nmi(records, cats)
        assert report.value is None
        assert report.n_used == 0
        assert report.n_skipped == 2
