"""Word-level text-quality signals and the three-stage keep/reject rule chain.

Signals are statistics over the whitespace-token stream of a document:
n-gram repetition fractions, vocabulary diversity, the fraction of words
with no alphabetic character, and a bad-word lexicon count. External
classifier scores (the ``ml_*`` fields) are carried as optional inputs
and never computed here.

Definitions, pinned because fixtures depend on them:

* A "word" is a maximal run of non-whitespace characters.
* "Alphabetic" means any Unicode letter.
* ``frac_chars_top_kgram`` is the number of characters covered by the
  most frequent word k-gram divided by the total characters of all
  k-gram occurrences; character totals count each occurrence with
  multiplicity and sum word lengths without inter-word whitespace.
  When several k-grams tie on frequency, the one covering the most
  characters wins (deterministic).
* ``frac_chars_dupe_ngrams`` is the fraction of those characters that
  belong to n-grams occurring more than once.
* n-gram statistics are case-sensitive by default (``lowercase=True``
  folds the token stream first).
* Bad-word counting always compares lowercased tokens against a
  lowercased lexicon.

The rule chain (``apply_rules``) rejects on hard repetition/length
conditions (rule 1), then accepts documents with a high math or code
classifier score (rule 2, a bypass that can never rescue a rule-1
failure), then rejects on secondary conditions (rule 3).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "QualitySignals",
    "FilterDecision",
    "compute_signals",
    "compute_signals_batch",
    "apply_rules",
    "load_badwords",
    "RULE_1_CONDITIONS",
    "RULE_2_CONDITIONS",
    "RULE_3_CONDITIONS",
    "THRESHOLDS_VERSION",
]

TOP_NGRAM_SIZES = (2, 3)
DUPE_NGRAM_SIZES = (5, 6, 7, 8, 9, 10)

# Versioned threshold table. Each entry is (signal field, operator,
# threshold); a document failing any rule-1 entry is rejected outright.
THRESHOLDS_VERSION = 1

RULE_1_CONDITIONS = (
    ("word_count", "<", 50),
    ("frac_chars_top_2gram", ">", 0.20),
    ("frac_chars_top_3gram", ">", 0.18),
    ("frac_chars_dupe_10grams", ">", 0.50),
    ("frac_chars_dupe_9grams", ">", 0.52),
    ("frac_chars_dupe_8grams", ">", 0.54),
    ("frac_chars_dupe_7grams", ">", 0.56),
    ("frac_chars_dupe_6grams", ">", 0.58),
    ("frac_chars_dupe_5grams", ">", 0.60),
)

RULE_2_CONDITIONS = (
    ("ml_math_score", ">", 0.3),
    ("ml_web_code_score", ">", 0.3),
)

RULE_3_CONDITIONS = (
    ("frac_unique_words", ">", 0.95),
    ("frac_no_alph_words", ">", 0.6),
    ("ldnoobw_words", ">", 10),
    ("ml_english_score", "<", 0.6),
)

_FRACTION_FIELDS = (
    "frac_chars_top_2gram",
    "frac_chars_top_3gram",
    "frac_chars_dupe_5grams",
    "frac_chars_dupe_6grams",
    "frac_chars_dupe_7grams",
    "frac_chars_dupe_8grams",
    "frac_chars_dupe_9grams",
    "frac_chars_dupe_10grams",
    "frac_unique_words",
    "frac_no_alph_words",
)

_OPTIONAL_FIELDS = ("ml_english_score", "ml_math_score", "ml_web_code_score")


@dataclass(frozen=True)
class QualitySignals:
    """Per-document signal vector. All fractions lie in [0, 1].

    ``extras`` carries unrecognized columns from an input record's
    signal namespace (for example externally computed ``rps_*`` scores)
    so they round-trip and stay addressable by filters.
    """

    word_count: int = 0
    frac_chars_top_2gram: float = 0.0
    frac_chars_top_3gram: float = 0.0
    frac_chars_dupe_5grams: float = 0.0
    frac_chars_dupe_6grams: float = 0.0
    frac_chars_dupe_7grams: float = 0.0
    frac_chars_dupe_8grams: float = 0.0
    frac_chars_dupe_9grams: float = 0.0
    frac_chars_dupe_10grams: float = 0.0
    frac_unique_words: float = 0.0
    frac_no_alph_words: float = 0.0
    ldnoobw_words: int = 0
    ml_english_score: float | None = None
    ml_math_score: float | None = None
    ml_web_code_score: float | None = None
    extras: Mapping[str, object] | None = None

    def __post_init__(self) -> None:
        if self.word_count < 0:
            raise ValueError("word_count must be nonnegative")
        if self.ldnoobw_words < 0:
            raise ValueError("ldnoobw_words must be nonnegative")
        for name in _FRACTION_FIELDS:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v!r} outside [0, 1]")

    def to_dict(self) -> dict:
        """Serializable mapping; absent ml_* fields are omitted."""
        out: dict = {}
        for f in fields(self):
            if f.name == "extras":
                continue
            v = getattr(self, f.name)
            if f.name in _OPTIONAL_FIELDS and v is None:
                continue
            out[f.name] = v
        if self.extras:
            for k, v in self.extras.items():
                out.setdefault(k, v)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, object]) -> "QualitySignals":
        """Build from a signal namespace, keeping unknown keys in extras."""
        known = {f.name for f in fields(cls)} - {"extras"}
        kwargs: dict = {}
        extras: dict = {}
        for k, v in data.items():
            if k in known:
                kwargs[k] = v
            else:
                extras[k] = v
        if extras:
            kwargs["extras"] = extras
        return cls(**kwargs)

    def get(self, name: str):
        """Look up a declared field or an extras column; None if absent."""
        if name != "extras" and hasattr(self, name):
            return getattr(self, name)
        if self.extras:
            return self.extras.get(name)
        return None


@dataclass(frozen=True)
class FilterDecision:
    """Outcome of the rule chain for one signal vector.

    ``rule_fired`` names the first condition that decided the verdict
    ("rule1:word_count", "rule2:ml_math_score" for a bypass accept,
    "rule3:ldnoobw_words"), or None for a clean keep.
    """

    verdict: str
    rule_fired: str | None = None

    def __post_init__(self) -> None:
        if self.verdict not in ("keep", "reject"):
            raise ValueError(f"verdict must be keep or reject, got {self.verdict!r}")


def load_badwords(path) -> frozenset:
    """Load a bad-word lexicon: one token per line, lowercased, '#' comments."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            tok = line.strip()
            if tok and not tok.startswith("#"):
                words.add(tok.lower())
    return frozenset(words)


# Any Unicode letter; \w minus digits and underscore.
_LETTER_RE = re.compile(r"[^\W\d_]")

# Polynomial-rolling and per-document salting constants (64-bit, odd
# multiplier). Collisions within a document are the only hazard and are
# vanishingly unlikely at document scale.
_MIX = np.uint64(0x9E3779B97F4A7C15)
_SALT_MUL = np.uint64(0xD1B54A32D192ED03)
_SALT_XOR = np.uint64(0x94D049BB133111EB)


def _has_alpha(word: str) -> bool:
    return word.isalpha() or _LETTER_RE.search(word) is not None


def compute_signals(text: str, badwords: Iterable[str] = frozenset(), *,
                    lowercase: bool = False) -> QualitySignals:
    """Compute the signal vector for one document.

    Empty text yields zero counts with all fractions defined as 0. The
    ml_* fields are left absent; they come from external classifiers.
    """
    return compute_signals_batch([text], badwords, lowercase=lowercase)[0]


def compute_signals_batch(texts: Sequence[str],
                          badwords: Iterable[str] = frozenset(), *,
                          lowercase: bool = False) -> list[QualitySignals]:
    """Compute signal vectors for a batch of documents.

    The batch form amortizes the vectorized n-gram counting across
    documents and is the fast path used by the command-line pipeline.
    Results are identical to per-document computation.
    """
    n_docs = len(texts)
    if n_docs == 0:
        return []
    if badwords and not isinstance(badwords, (set, frozenset)):
        badwords = frozenset(badwords)

    word_lists = [(t.lower() if lowercase else t).split() for t in texts]
    counts = np.array([len(ws) for ws in word_lists], dtype=np.int64)
    doc_starts = np.concatenate(([0], np.cumsum(counts)))
    n_words = int(doc_starts[-1])
    zeros = np.zeros(n_docs)

    if n_words == 0:
        return [QualitySignals() for _ in range(n_docs)]

    flat = [w for ws in word_lists for w in ws]
    doc_of = np.repeat(np.arange(n_docs, dtype=np.int64), counts)
    salts = (np.arange(n_docs, dtype=np.uint64) * _SALT_MUL) ^ _SALT_XOR
    ids = np.fromiter(map(hash, flat), count=n_words, dtype=np.int64).view(np.uint64)
    ids = ids ^ salts[doc_of]
    lens = np.fromiter(map(len, flat), count=n_words, dtype=np.int64)
    pref = np.concatenate(([0], np.cumsum(lens)))

    _, first_idx = np.unique(ids, return_index=True)
    n_unique = np.bincount(doc_of[first_idx], minlength=n_docs)
    frac_unique = np.divide(n_unique, counts, out=zeros.copy(), where=counts > 0)

    # Letter detection is pure per string; memoize over the batch vocabulary.
    alpha_seen: dict[str, bool] = {}
    no_alpha = np.fromiter(
        (not (alpha_seen[w] if w in alpha_seen
              else alpha_seen.setdefault(w, _has_alpha(w))) for w in flat),
        count=n_words, dtype=bool)
    n_no_alpha = np.bincount(doc_of[no_alpha], minlength=n_docs)
    frac_no_alpha = np.divide(n_no_alpha, counts, out=zeros.copy(), where=counts > 0)

    if badwords:
        bad = np.fromiter((w.lower() in badwords for w in flat), count=n_words, dtype=bool)
        n_bad = np.bincount(doc_of[bad], minlength=n_docs)
    else:
        n_bad = np.zeros(n_docs, dtype=np.int64)

    top_frac = {n: zeros for n in TOP_NGRAM_SIZES}
    dupe_frac = {n: zeros for n in DUPE_NGRAM_SIZES}
    dup_prev: np.ndarray | None = None
    h = ids
    for n in range(2, 11):
        h = h[:-1] * _MIX + ids[n - 1:]
        m = n_words - n + 1
        if m <= 0:
            break
        if n not in TOP_NGRAM_SIZES and n not in DUPE_NGRAM_SIZES:
            continue
        valid = doc_of[:m] == doc_of[n - 1:]
        occ_all = pref[n:n + m] - pref[:m]
        dv = doc_of[:m][valid]
        totals = np.bincount(dv, weights=occ_all[valid].astype(np.float64),
                             minlength=n_docs)

        if n in TOP_NGRAM_SIZES:
            hv = h[:m][valid]
            occ = occ_all[valid]
            _, inv, cnt = np.unique(hv, return_inverse=True, return_counts=True)
            occ_cnt = cnt[inv]
            top = np.zeros(n_docs)
            if dv.size:
                seg_starts = np.searchsorted(dv, np.arange(n_docs))
                seg_lens = np.diff(np.append(seg_starts, dv.size))
                red_idx = np.minimum(seg_starts, dv.size - 1)
                max_cnt = np.maximum.reduceat(occ_cnt, red_idx)
                coverage = np.where(occ_cnt == np.repeat(max_cnt, seg_lens),
                                    occ_cnt * occ, 0)
                top = np.where(seg_lens > 0,
                               np.maximum.reduceat(coverage, red_idx), 0.0)
            top_frac[n] = np.divide(top, totals, out=np.zeros(n_docs),
                                    where=totals > 0)
            continue

        # Duplicate n-grams. For n > 5 a duplicated n-gram requires
        # duplicated (n-1)-grams at both ends, so only those candidate
        # positions need counting.
        if n == 5:
            pos = np.flatnonzero(valid)
        else:
            assert dup_prev is not None
            pos = np.flatnonzero(dup_prev[:-1] & dup_prev[1:])
        dup_full = np.zeros(m, dtype=bool)
        dupe_chars = np.zeros(n_docs)
        if pos.size:
            hv = h[pos]
            _, inv, cnt = np.unique(hv, return_inverse=True, return_counts=True)
            dmask = cnt[inv] > 1
            dpos = pos[dmask]
            dup_full[dpos] = True
            if dpos.size:
                dupe_chars = np.bincount(
                    doc_of[dpos], weights=occ_all[dpos].astype(np.float64),
                    minlength=n_docs)
        dup_prev = dup_full
        dupe_frac[n] = np.divide(dupe_chars, totals, out=np.zeros(n_docs),
                                 where=totals > 0)

    out = []
    for d in range(n_docs):
        out.append(QualitySignals(
            word_count=int(counts[d]),
            frac_chars_top_2gram=float(top_frac[2][d]),
            frac_chars_top_3gram=float(top_frac[3][d]),
            frac_chars_dupe_5grams=float(dupe_frac[5][d]),
            frac_chars_dupe_6grams=float(dupe_frac[6][d]),
            frac_chars_dupe_7grams=float(dupe_frac[7][d]),
            frac_chars_dupe_8grams=float(dupe_frac[8][d]),
            frac_chars_dupe_9grams=float(dupe_frac[9][d]),
            frac_chars_dupe_10grams=float(dupe_frac[10][d]),
            frac_unique_words=float(frac_unique[d]),
            frac_no_alph_words=float(frac_no_alpha[d]),
            ldnoobw_words=int(n_bad[d]),
        ))
    return out


def apply_rules(signals: QualitySignals, *,
                english_absent_rejects: bool = True) -> FilterDecision:
    """Run the keep/reject rule chain over a signal vector.

    Rule 1 conditions are checked first in table order and reject
    unconditionally; the rule-2 classifier bypass can never rescue a
    rule-1 failure. Absent ml_math/ml_web_code scores simply fail the
    bypass. An absent ml_english_score rejects by default (conservative;
    disable with english_absent_rejects=False).
    """
    for name, op, threshold in RULE_1_CONDITIONS:
        v = getattr(signals, name)
        if (v < threshold) if op == "<" else (v > threshold):
            return FilterDecision("reject", f"rule1:{name}")

    for name, _, threshold in RULE_2_CONDITIONS:
        v = getattr(signals, name)
        if v is not None and v > threshold:
            return FilterDecision("keep", f"rule2:{name}")

    for name, op, threshold in RULE_3_CONDITIONS:
        v = getattr(signals, name)
        if v is None:
            if name == "ml_english_score" and english_absent_rejects:
                return FilterDecision("reject", f"rule3:{name}")
            continue
        if (v < threshold) if op == "<" else (v > threshold):
            return FilterDecision("reject", f"rule3:{name}")

    return FilterDecision("keep", None)
