"""Overlap agreement, closed-form expected agreement, and annotator kappa.

Annotators emit 0, 1, or 2 distinct labels per document per category
(0 only when raw output is malformed). Two annotations agree when their
label sets intersect or are both empty; the weighted variant scores
intersection-over-union instead.

Chance agreement is computed in closed form from a generative model of
each annotator: a fertility distribution f = (f0, f1, f2) over how many
labels are emitted, and a label-choice distribution w used for the
first pick and, renormalized without replacement, for the second. For
annotators 1 and 2 the expected agreement is

    P_e = f1_0 f2_0 + sum_{j,k in {1,2}} f1_j f2_k p_jk

with, writing r_n(x) = sum_{y != x} w_n(y) / (1 - w_n(y)),

    p_11 = s11 sum_x w1(x) w2(x)
    p_12 = s12 sum_x w1(x) w2(x) (1 + r_2(x))
    p_21 = s12 sum_x w1(x) w2(x) (1 + r_1(x))
    p_22 = s22 sum_x w1(x) w2(x) (1 + r_1(x) + r_2(x) + r_1(x) r_2(x))
           + a * (two cross terms over ordered label pairs, see code)

where the unweighted variant uses s = 1 everywhere with over-count
adjustment a = -1, and the weighted variant uses s11 = 1,
s12 = s21 = 1/2, s22 = 1/3, a = +1/3.

kappa = (P_o - P_e) / (1 - P_e). Annotator kappa scores a candidate
against two reference annotators and reports the mean of the two
chance-corrected scores per category.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "AnnotatorModel",
    "AgreementReport",
    "CategoryAgreement",
    "agree_unweighted",
    "agree_weighted",
    "observed_agreement",
    "fit_annotator_model",
    "expected_agreement",
    "kappa",
    "annotator_kappa",
]

LabelSet = Iterable[str]


def _as_set(labels: LabelSet) -> frozenset:
    s = frozenset(str(x).strip() for x in labels)
    if len(s) > 2:
        raise ValueError(f"label set may hold at most 2 labels, got {sorted(s)}")
    return s


def agree_unweighted(a: LabelSet, b: LabelSet) -> int:
    """1 iff the label sets intersect or are both empty, else 0."""
    sa, sb = _as_set(a), _as_set(b)
    if not sa and not sb:
        return 1
    return 1 if sa & sb else 0


def agree_weighted(a: LabelSet, b: LabelSet) -> float:
    """Intersection-over-union of the label sets; 1 when both are empty."""
    sa, sb = _as_set(a), _as_set(b)
    union = sa | sb
    if not union:
        return 1.0
    return len(sa & sb) / len(union)


def observed_agreement(pairs: Sequence[tuple[LabelSet, LabelSet]],
                       weighted: bool = False) -> float:
    """Mean agreement over annotation pairs."""
    if len(pairs) == 0:
        raise ValueError("observed_agreement requires at least one pair")
    score = agree_weighted if weighted else agree_unweighted
    return sum(score(a, b) for a, b in pairs) / len(pairs)


@dataclass(frozen=True)
class AnnotatorModel:
    """Generative model of one annotator for one category.

    fertility[k] is the probability of emitting k labels (k = 0, 1, 2);
    label_dist maps each label to its first-pick probability, with the
    second pick drawn from the same distribution without replacement.
    """

    fertility: tuple[float, float, float]
    label_dist: Mapping[str, float]

    def __post_init__(self) -> None:
        f = tuple(float(x) for x in self.fertility)
        if len(f) != 3:
            raise ValueError("fertility must have exactly three entries")
        if any(x < 0 for x in f):
            raise ValueError("fertility probabilities must be nonnegative")
        if abs(sum(f) - 1.0) > 1e-12:
            raise ValueError(f"fertility must sum to 1, got {sum(f)!r}")
        object.__setattr__(self, "fertility", f)
        w = {str(k): float(v) for k, v in self.label_dist.items()}
        if any(v < 0 for v in w.values()):
            raise ValueError("label probabilities must be nonnegative")
        if f[1] + f[2] > 0:
            if not w:
                raise ValueError("label_dist required when labels can be emitted")
            if abs(sum(w.values()) - 1.0) > 1e-12:
                raise ValueError(f"label_dist must sum to 1, got {sum(w.values())!r}")
        if f[2] > 0 and any(v >= 1.0 for v in w.values()):
            raise ValueError(
                "a label with probability 1 leaves nothing for a second pick")
        object.__setattr__(self, "label_dist", dict(w))


def fit_annotator_model(annotations: Sequence[LabelSet], *,
                        drop_empty: bool = False,
                        primary_only: bool = False) -> AnnotatorModel:
    """Fit empirical fertility and label-choice distributions.

    Label frequencies pool both label positions by default, matching
    the generative model's single choice distribution; primary_only
    restricts to the first label. Empty sets count toward fertility
    (they are real parse failures) unless drop_empty is set.
    """
    sets = []
    for labels in annotations:
        ordered = [str(x).strip() for x in labels]
        if len(set(ordered)) != len(ordered) or len(ordered) > 2:
            raise ValueError(f"invalid label set {ordered!r}")
        if ordered or not drop_empty:
            sets.append(ordered)
    if not sets:
        raise ValueError("cannot fit a model from zero annotations")

    size_counts = Counter(len(s) for s in sets)
    n = len(sets)
    fertility = (size_counts[0] / n, size_counts[1] / n, size_counts[2] / n)

    label_counts: Counter = Counter()
    for s in sets:
        picks = s[:1] if primary_only else s
        label_counts.update(picks)
    total = sum(label_counts.values())
    label_dist = {lab: c / total for lab, c in label_counts.items()} if total else {}
    return AnnotatorModel(fertility=fertility, label_dist=label_dist)


def _aligned_dists(m1: AnnotatorModel, m2: AnnotatorModel):
    labels = sorted(set(m1.label_dist) | set(m2.label_dist))
    w1 = np.array([m1.label_dist.get(lab, 0.0) for lab in labels])
    w2 = np.array([m2.label_dist.get(lab, 0.0) for lab in labels])
    return w1, w2


def _pick_ratio(w: np.ndarray, can_pick_two: bool) -> np.ndarray:
    """w / (1 - w), used only when a second pick can happen."""
    if not can_pick_two:
        return np.zeros_like(w)
    return w / (1.0 - w)


def expected_agreement(m1: AnnotatorModel, m2: AnnotatorModel,
                       weighted: bool = False) -> float:
    """Closed-form chance agreement between two annotator models."""
    f1, f2 = m1.fertility, m2.fertility
    w1, w2 = _aligned_dists(m1, m2)
    if weighted:
        s11, s12, s22, a = 1.0, 0.5, 1.0 / 3.0, 1.0 / 3.0
    else:
        s11, s12, s22, a = 1.0, 1.0, 1.0, -1.0

    u1 = _pick_ratio(w1, f1[2] > 0)
    u2 = _pick_ratio(w2, f2[2] > 0)
    r1 = u1.sum() - u1
    r2 = u2.sum() - u2

    ww = w1 * w2
    s = float(ww.sum())
    p11 = s11 * s
    p12 = s12 * float((ww * (1.0 + r2)).sum())
    p21 = s12 * float((ww * (1.0 + r1)).sum())

    # Cross terms over ordered pairs (x, y), x != y:
    #   sum u1(x) w1(y) u2(x) w2(y)   and   sum u1(x) w1(y) w2(x) u2(y)
    cross_same = float((u1 * u2 * (s - ww)).sum())
    t = float((w1 * u2).sum())
    cross_swap = float((u1 * w2 * (t - w1 * u2)).sum())
    p22 = (s22 * float((ww * (1.0 + r1 + r2 + r1 * r2)).sum())
           + a * (cross_same + cross_swap))

    return (f1[0] * f2[0]
            + f1[1] * f2[1] * p11
            + f1[1] * f2[2] * p12
            + f1[2] * f2[1] * p21
            + f1[2] * f2[2] * p22)


def kappa(p_o: float, p_e: float) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e).

    Reported raw: values are not clamped, and near-degenerate chance
    agreement legitimately amplifies small differences in p_o.
    """
    if not 0.0 <= p_o <= 1.0:
        raise ValueError(f"p_o must lie in [0, 1], got {p_o!r}")
    if not 0.0 <= p_e < 1.0:
        raise ValueError(f"p_e must lie in [0, 1), got {p_e!r}")
    return (p_o - p_e) / (1.0 - p_e)


@dataclass(frozen=True)
class AgreementReport:
    """Observed/expected agreement and kappa for one annotator pairing."""

    p_o: float
    p_e: float
    kappa: float
    n_pairs: int
    weighted: bool

    def __post_init__(self) -> None:
        expect = (self.p_o - self.p_e) / (1.0 - self.p_e)
        if self.kappa != expect:
            raise ValueError("kappa must equal (p_o - p_e) / (1 - p_e) exactly")


@dataclass(frozen=True)
class CategoryAgreement:
    """Per-category result: one report per reference pairing plus their mean."""

    category: str
    vs_gold1: AgreementReport
    vs_gold2: AgreementReport
    mean_kappa: float


def _pairing_report(cand: Mapping[object, LabelSet],
                    gold: Mapping[object, LabelSet],
                    doc_ids: Sequence[object],
                    weighted: bool) -> AgreementReport:
    pairs = [(cand[d], gold[d]) for d in doc_ids]
    p_o = observed_agreement(pairs, weighted=weighted)
    model_c = fit_annotator_model([cand[d] for d in doc_ids])
    model_g = fit_annotator_model([gold[d] for d in doc_ids])
    p_e = expected_agreement(model_c, model_g, weighted=weighted)
    return AgreementReport(p_o=p_o, p_e=p_e, kappa=kappa(p_o, p_e),
                           n_pairs=len(pairs), weighted=weighted)


def annotator_kappa(candidate: Mapping[str, Mapping[object, LabelSet]],
                    gold1: Mapping[str, Mapping[object, LabelSet]],
                    gold2: Mapping[str, Mapping[object, LabelSet]],
                    weighted: bool = False) -> dict[str, CategoryAgreement]:
    """Score a candidate annotator against two reference annotators.

    Inputs map category -> document id -> label set. All three
    annotators must cover the same categories and, per category, the
    same document ids; mismatches raise with the missing ids named.
    Expected agreement is computed per pairing from the two fitted
    models of that pairing.
    """
    cats = set(candidate)
    if cats != set(gold1) or cats != set(gold2):
        diff = cats ^ set(gold1) | cats ^ set(gold2)
        raise ValueError(f"annotators disagree on categories: {sorted(diff)}")

    out: dict[str, CategoryAgreement] = {}
    for cat in sorted(cats):
        ids = set(candidate[cat])
        for name, ann in (("gold1", gold1), ("gold2", gold2)):
            missing = ids ^ set(ann[cat])
            if missing:
                shown = sorted(missing, key=repr)[:10]
                raise ValueError(
                    f"category {cat!r}: document ids differ vs {name}: {shown}")
        doc_ids = sorted(ids, key=repr)
        r1 = _pairing_report(candidate[cat], gold1[cat], doc_ids, weighted)
        r2 = _pairing_report(candidate[cat], gold2[cat], doc_ids, weighted)
        out[cat] = CategoryAgreement(category=cat, vs_gold1=r1, vs_gold2=r2,
                                     mean_kappa=(r1.kappa + r2.kappa) / 2.0)
    return out
