"""Inter-category redundancy via normalized mutual information.

Two metric categories are compared through the contingency table of
their primary labels over documents that carry both. The score is
NMI = 2 I(X;Y) / (H(X) + H(Y)) with the convention 0 log 0 = 0, so 0
means statistical independence and 1 means either category is a
relabeling of the other. When both categories are constant the
denominator vanishes; that degenerate case is defined as 0 and
flagged, since a constant category carries no redundancy signal.

The corpus-level average skips category pairs involving the default
exclusion set {doc_type_v2, fdc_level_1, fdc_level_2}: the FDC levels
are nested refinements of one code and the two document-type schemes
overlap by construction, so including them would double-count known
redundancy. The set is configurable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .records import METRIC_CATEGORIES, DocumentRecord, primary_label

__all__ = [
    "ContingencyTable",
    "NmiReport",
    "DEFAULT_NMI_EXCLUSIONS",
    "joint_counts",
    "nmi",
    "is_degenerate",
    "mean_nmi",
    "pairwise_nmi",
]

DEFAULT_NMI_EXCLUSIONS = frozenset({"doc_type_v2", "fdc_level_1", "fdc_level_2"})


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Joint counts of two categories' labels. counts[i, j] is the number
    of documents labeled row_labels[i] in A and col_labels[j] in B."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError("counts shape does not match label axes")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        if counts.sum() <= 0:
            raise ValueError("table must contain at least one observation")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "ContingencyTable":
        """Count (label_a, label_b) pairs into a table with sorted axes."""
        pair_list = list(pairs)
        rows = sorted({a for a, _ in pair_list})
        cols = sorted({b for _, b in pair_list})
        ri = {a: i for i, a in enumerate(rows)}
        ci = {b: j for j, b in enumerate(cols)}
        counts = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for a, b in pair_list:
            counts[ri[a], ci[b]] += 1
        return cls(tuple(rows), tuple(cols), counts)

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.col_labels, self.row_labels,
                                self.counts.T.copy())

    def merge(self, other: "ContingencyTable") -> "ContingencyTable":
        """Cellwise sum, aligning label axes; shard tables compose."""
        rows = tuple(sorted(set(self.row_labels) | set(other.row_labels)))
        cols = tuple(sorted(set(self.col_labels) | set(other.col_labels)))
        counts = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for table in (self, other):
            ri = [rows.index(a) for a in table.row_labels]
            ci = [cols.index(b) for b in table.col_labels]
            counts[np.ix_(ri, ci)] += table.counts
        return ContingencyTable(rows, cols, counts)


def joint_counts(records: Iterable[DocumentRecord], cat_a: str,
                 cat_b: str) -> tuple[ContingencyTable, int]:
    """Build the contingency table of two categories' primary labels.

    Documents lacking either primary label are skipped; the skip count
    is returned alongside. Raises when no document carries both.
    """
    pairs = []
    skipped = 0
    for record in records:
        a = primary_label(record, cat_a)
        b = primary_label(record, cat_b)
        if a is None or b is None:
            skipped += 1
        else:
            pairs.append((a, b))
    if not pairs:
        raise ValueError(
            f"no documents carry both {cat_a!r} and {cat_b!r} primary labels")
    return ContingencyTable.from_pairs(pairs), skipped


def _entropies(table: ContingencyTable) -> tuple[float, float, float]:
    p = table.counts / table.total
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    hx = float(-(px[px > 0] * np.log(px[px > 0])).sum())
    hy = float(-(py[py > 0] * np.log(py[py > 0])).sum())
    nz = p > 0
    outer = np.outer(px, py)
    mi = float((p[nz] * (np.log(p[nz]) - np.log(outer[nz]))).sum())
    return mi, hx, hy


def is_degenerate(table: ContingencyTable) -> bool:
    """True when both categories are constant (zero total entropy)."""
    _, hx, hy = _entropies(table)
    return hx + hy == 0.0


def nmi(table: ContingencyTable) -> float:
    """Normalized mutual information 2 I / (H_row + H_col) in [0, 1].

    Symmetric in the two axes; 0 for the degenerate both-constant case.
    """
    mi, hx, hy = _entropies(table)
    denom = hx + hy
    if denom == 0.0:
        return 0.0
    return max(2.0 * mi / denom, 0.0)


def mean_nmi(tables: Mapping[tuple[str, str], ContingencyTable],
             exclusions: frozenset = DEFAULT_NMI_EXCLUSIONS) -> float:
    """Arithmetic mean of NMI over unordered category pairs, skipping
    any pair that touches an excluded category."""
    values = [nmi(t) for (a, b), t in tables.items()
              if a not in exclusions and b not in exclusions]
    if not values:
        raise ValueError("every category pair is excluded")
    return sum(values) / len(values)


@dataclass(frozen=True)
class NmiReport:
    """One category pair's redundancy score and its support counts."""

    category_a: str
    category_b: str
    value: float | None
    degenerate: bool
    n_used: int
    n_skipped: int


def pairwise_nmi(records: Iterable[DocumentRecord],
                 categories: Sequence[str] = METRIC_CATEGORIES
                 ) -> list[NmiReport]:
    """NMI for every unordered pair of categories over one record pass.

    Pairs with no jointly labeled documents are reported with a None
    value rather than raising, so sparse corpora still produce a matrix.
    """
    rows = []
    for record in records:
        rows.append({c: primary_label(record, c) for c in categories})

    reports = []
    for i, cat_a in enumerate(categories):
        for cat_b in categories[i + 1:]:
            pairs = [(r[cat_a], r[cat_b]) for r in rows
                     if r[cat_a] is not None and r[cat_b] is not None]
            skipped = len(rows) - len(pairs)
            if not pairs:
                reports.append(NmiReport(cat_a, cat_b, None, False, 0, skipped))
                continue
            table = ContingencyTable.from_pairs(pairs)
            reports.append(NmiReport(cat_a, cat_b, nmi(table),
                                     is_degenerate(table), len(pairs), skipped))
    return reports
