"""Independent reference implementations used to pin expected values.

Everything here deliberately avoids the library's code paths: expected
agreement is checked by exhaustive enumeration and Monte-Carlo
sampling, quality signals by plain Counter loops, and NMI by a direct
log-sum evaluation. Agreement between library and oracle is then
evidence, not circularity.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import combinations

import numpy as np

from taxonomy_forge.agreement import AnnotatorModel


# Agreement: exhaustive enumeration ------------------------------------------

def enumerate_annotations(model: AnnotatorModel) -> list[tuple[frozenset, float]]:
    """Every possible annotation of one document with its probability.

    The generative model: fertility f picks the label count; one label
    is drawn from w; a second distinct label is drawn from w
    renormalized without the first.
    """
    f0, f1, f2 = model.fertility
    w = model.label_dist
    labels = sorted(w)
    out: list[tuple[frozenset, float]] = []
    if f0 > 0:
        out.append((frozenset(), f0))
    if f1 > 0:
        for x in labels:
            if w[x] > 0:
                out.append((frozenset([x]), f1 * w[x]))
    if f2 > 0:
        for x, y in combinations(labels, 2):
            if w[x] > 0 and w[y] > 0:
                p = (w[x] * w[y] / (1.0 - w[x])
                     + w[x] * w[y] / (1.0 - w[y]))
                out.append((frozenset([x, y]), f2 * p))
    return out


def score_sets(a: frozenset, b: frozenset, weighted: bool) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    inter = a & b
    if weighted:
        return len(inter) / len(union)
    return 1.0 if inter else 0.0


def enum_expected_agreement(m1: AnnotatorModel, m2: AnnotatorModel,
                            weighted: bool = False) -> float:
    """Exact chance agreement by summing over all annotation pairs."""
    total = 0.0
    for s1, p1 in enumerate_annotations(m1):
        for s2, p2 in enumerate_annotations(m2):
            total += p1 * p2 * score_sets(s1, s2, weighted)
    return total


# Agreement: Monte-Carlo ------------------------------------------------------

def _sample_codes(model: AnnotatorModel, labels: list[str], n: int,
                  rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Sample n annotations as label-index pairs, -1 for empty slots.

    Second picks use the Gumbel-top-2 trick: perturbing log w with
    Gumbel noise and taking the two largest keys draws an ordered pair
    without replacement from w.
    """
    w = np.array([model.label_dist.get(x, 0.0) for x in labels])
    f0, f1, _ = model.fertility
    u = rng.random(n)
    fert = (u >= f0).astype(np.int64) + (u >= f0 + f1)
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    keys = logw[None, :] + rng.gumbel(size=(n, len(labels)))
    order = np.argsort(-keys, axis=1)
    first = order[:, 0]
    second = order[:, 1] if len(labels) >= 2 else np.full(n, -1)
    a1 = np.where(fert >= 1, first, -1)
    a2 = np.where(fert == 2, second, -1)
    return a1, a2


def mc_agreement(m1: AnnotatorModel, m2: AnnotatorModel, n_samples: int,
                 rng: np.random.Generator) -> dict[str, tuple[float, float]]:
    """Monte-Carlo chance agreement for both score variants on shared
    samples; returns {variant: (estimate, standard_error)}."""
    labels = sorted(set(m1.label_dist) | set(m2.label_dist))
    a1, a2 = _sample_codes(m1, labels, n_samples, rng)
    b1, b2 = _sample_codes(m2, labels, n_samples, rng)
    # Distinct fill values so empty slots never count as matches.
    b1 = np.where(b1 < 0, -2, b1)
    b2 = np.where(b2 < 0, -2, b2)

    matches = ((a1 == b1).astype(np.int64) + (a1 == b2)
               + (a2 == b1) + (a2 == b2))
    n_a = (a1 >= 0).astype(np.int64) + (a2 >= 0)
    n_b = (b1 >= 0).astype(np.int64) + (b2 >= 0)
    union = n_a + n_b - matches

    unweighted = ((matches > 0) | (union == 0)).astype(np.float64)
    weighted = np.where(union > 0, matches / np.maximum(union, 1), 1.0)

    out = {}
    for name, scores in (("unweighted", unweighted), ("weighted", weighted)):
        est = float(scores.mean())
        se = float(scores.std(ddof=1) / math.sqrt(n_samples))
        out[name] = (est, se)
    return out


def random_annotator_model(rng: np.random.Generator, v_min: int = 2,
                           v_max: int = 10) -> AnnotatorModel:
    """A random valid model with varied vocabulary size and fertility
    style (always-one, no-empty, general, and no-second-pick shapes)."""
    size = int(rng.integers(v_min, v_max + 1))
    alpha = float(rng.choice([0.5, 1.0, 3.0]))
    w = rng.dirichlet(np.full(size, alpha))
    while w.max() >= 0.99:
        w = rng.dirichlet(np.full(size, alpha))

    style = int(rng.integers(0, 4))
    if style == 0:
        fertility = (0.0, 1.0, 0.0)
    elif style == 1:
        p = float(rng.uniform(0.2, 0.8))
        fertility = (0.0, p, 1.0 - p)
    elif style == 2:
        f = rng.dirichlet([1.0, 6.0, 3.0])
        fertility = (float(f[0]), float(f[1]), float(f[2]))
    else:
        q = float(rng.uniform(0.0, 0.3))
        fertility = (q, 1.0 - q, 0.0)

    labels = {f"L{i}": float(w[i]) for i in range(size)}
    total = sum(labels.values())
    labels = {k: v / total for k, v in labels.items()}
    return AnnotatorModel(fertility=fertility, label_dist=labels)


# Quality signals: Counter reference ------------------------------------------

def counter_signals(text: str, badwords: frozenset = frozenset(),
                    lowercase: bool = False) -> dict:
    """Straightforward per-document signal computation.

    Mirrors the pinned definitions: words are whitespace tokens, n-gram
    character totals count every occurrence (word lengths, no spaces),
    the top k-gram is the most frequent with ties broken by character
    coverage, and duplicate chars belong to n-grams seen more than once.
    """
    words = (text.lower() if lowercase else text).split()
    n = len(words)
    out = {
        "word_count": n,
        "frac_unique_words": 0.0,
        "frac_no_alph_words": 0.0,
        "ldnoobw_words": 0,
    }
    for k in (2, 3):
        out[f"frac_chars_top_{k}gram"] = 0.0
    for k in range(5, 11):
        out[f"frac_chars_dupe_{k}grams"] = 0.0
    if n == 0:
        return out

    out["frac_unique_words"] = len(set(words)) / n
    out["frac_no_alph_words"] = sum(
        1 for w in words if not any(ch.isalpha() for ch in w)) / n
    out["ldnoobw_words"] = sum(1 for w in words if w.lower() in badwords)

    lens = [len(w) for w in words]

    def gram_chars(i: int, k: int) -> int:
        return sum(lens[i:i + k])

    for k in (2, 3):
        m = n - k + 1
        if m <= 0:
            continue
        grams = [tuple(words[i:i + k]) for i in range(m)]
        counts = Counter(grams)
        per_occ = {g: sum(len(w) for w in g) for g in counts}
        total = sum(per_occ[grams[i]] for i in range(m))
        best_count = max(counts.values())
        best_coverage = max(counts[g] * per_occ[g] for g in counts
                            if counts[g] == best_count)
        out[f"frac_chars_top_{k}gram"] = (best_coverage / total
                                          if total else 0.0)

    for k in range(5, 11):
        m = n - k + 1
        if m <= 0:
            continue
        grams = [tuple(words[i:i + k]) for i in range(m)]
        counts = Counter(grams)
        total = sum(gram_chars(i, k) for i in range(m))
        dupe = sum(gram_chars(i, k) for i in range(m)
                   if counts[grams[i]] > 1)
        out[f"frac_chars_dupe_{k}grams"] = dupe / total if total else 0.0

    return out


# NMI: direct evaluation -------------------------------------------------------

def brute_nmi(counts) -> float:
    """2 I(X;Y) / (H(X) + H(Y)) evaluated directly with natural logs."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    p = counts / total
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    mi = 0.0
    for i in range(p.shape[0]):
        for j in range(p.shape[1]):
            if p[i, j] > 0:
                mi += p[i, j] * math.log(p[i, j] / (px[i] * py[j]))
    hx = -sum(v * math.log(v) for v in px if v > 0)
    hy = -sum(v * math.log(v) for v in py if v > 0)
    denom = hx + hy
    if denom == 0.0:
        return 0.0
    return 2.0 * mi / denom
