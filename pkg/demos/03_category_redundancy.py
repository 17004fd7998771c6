"""
Category redundancy: normalized mutual information between labelings
====================================================================

A taxonomy earns its categories only if they say different things. We
score each category pair with NMI = 2 I(X;Y) / (H(X) + H(Y)) over the
contingency table of their primary labels: 0 means knowing one label
tells you nothing about the other, 1 means either is a relabeling of
the other and one of them is dead weight.
"""

import numpy as np

from taxonomy_forge.records import CategoryAnnotation, DocumentRecord
from taxonomy_forge.redundancy import (ContingencyTable,
                                       DEFAULT_NMI_EXCLUSIONS, joint_counts,
                                       mean_nmi, nmi, pairwise_nmi)

# ---------------------------------------------------------------
# The two extremes. A permutation matrix is a pure relabeling: each
# row label maps to exactly one column label, so NMI is 1. An outer
# product of the marginals is exact independence, so NMI is 0.
# ---------------------------------------------------------------

relabeling = ContingencyTable(
    ("lecture", "exercise", "exam"),
    ("L", "X", "E"),
    np.array([[40, 0, 0], [0, 25, 0], [0, 0, 35]]))
print(f"pure relabeling:    NMI = {nmi(relabeling):.6f}")

marg_a = np.array([60, 40])
marg_b = np.array([30, 50, 20])
independent = ContingencyTable(
    ("stem", "non-stem"),
    ("short", "medium", "long"),
    np.outer(marg_a, marg_b))
print(f"exact independence: NMI = {nmi(independent):.6f}")

partial = ContingencyTable(
    ("stem", "non-stem"),
    ("short", "medium", "long"),
    np.array([[45, 10, 5], [5, 15, 20]]))
print(f"partial coupling:   NMI = {nmi(partial):.4f}")
print(f"symmetric in axes:  {nmi(partial) == nmi(partial.transpose())}")

# ---------------------------------------------------------------
# Tables compose cellwise, so shards of a corpus can be counted
# independently and merged.
# ---------------------------------------------------------------

shard_a = ContingencyTable(("x",), ("p", "q"), np.array([[3, 1]]))
shard_b = ContingencyTable(("x", "y"), ("q",), np.array([[2], [4]]))
merged = shard_a.merge(shard_b)
print("\nmerged shards:", merged.row_labels, merged.col_labels)
print(merged.counts)

# ---------------------------------------------------------------
# From records: joint_counts pairs two categories' primary labels,
# skipping documents that lack either.
# ---------------------------------------------------------------


def rec(fdc, doc_type, reasoning, education):
    return DocumentRecord(
        text=f"document {fdc} {doc_type} {reasoning} {education}",
        annotations={
            "fdc": CategoryAnnotation(primary=fdc),
            "doc_type_v1": CategoryAnnotation(primary=doc_type),
            "reasoning_depth": CategoryAnnotation(primary=reasoning),
            "education_level": CategoryAnnotation(primary=education),
        })


rng = np.random.default_rng(11)
fdc_codes = ("512", "516", "005", "610")
doc_types = ("Academic/Research", "Reference/Encyclopedic")
depths = ("Basic Reasoning", "Intermediate Reasoning", "Advanced Reasoning")
levels = ("High School Level", "Undergraduate Level", "Graduate Level")
corpus = []
for _ in range(400):
    fdc = fdc_codes[rng.integers(len(fdc_codes))]
    # Document type follows the subject closely; education level
    # follows reasoning depth; depth itself is independent of subject.
    doc_type = doc_types[0] if fdc in ("512", "516") else doc_types[1]
    if rng.random() < 0.1:
        doc_type = doc_types[rng.integers(2)]
    d = rng.integers(3)
    e = d if rng.random() < 0.8 else rng.integers(3)
    corpus.append(rec(fdc, doc_type, depths[d], levels[e]))
corpus.append(DocumentRecord(text="unlabeled stray"))

table, skipped = joint_counts(corpus, "fdc_level_1", "doc_type_v1")
print(f"\nfdc_level_1 x doc_type_v1: NMI = {nmi(table):.3f} "
      f"({table.total} used, {skipped} skipped)")
table, _ = joint_counts(corpus, "fdc_level_1", "reasoning_depth")
print(f"fdc_level_1 x reasoning_depth: NMI = {nmi(table):.3f}")

# ---------------------------------------------------------------
# The full matrix in one pass, and the corpus-level average. The
# default exclusions drop pairs whose redundancy is structural
# (nested FDC levels, the two document-type schemes) so the mean
# reflects only the informative comparisons.
# ---------------------------------------------------------------

cats = ("fdc_level_1", "fdc_level_2", "doc_type_v1", "reasoning_depth",
        "education_level")
reports = pairwise_nmi(corpus, cats)
print()
for r in reports:
    shown = "undefined" if r.value is None else f"{r.value:.3f}"
    print(f"  {r.category_a:15} x {r.category_b:15} NMI = {shown}")

tables = {}
for r in reports:
    if r.value is not None:
        t, _ = joint_counts(corpus, r.category_a, r.category_b)
        tables[(r.category_a, r.category_b)] = t
print("\nexcluded from the average:", sorted(DEFAULT_NMI_EXCLUSIONS))
print(f"mean NMI over informative pairs: {mean_nmi(tables):.3f}")
