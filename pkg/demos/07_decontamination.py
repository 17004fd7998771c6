"""
Decontamination: keeping benchmark text out of training data
============================================================

A benchmark leaks into a corpus through quotes, mirrors, and scrapes.
The defense is an n-gram membership filter: every sliding window of
13 normalized tokens from every benchmark document goes into a Bloom
filter, and a training document matching even one window is dropped.
The filter is sized from the observed n-gram count for a chosen
false-positive rate, so the collateral damage on clean documents is a
dial, not an accident.
"""

import tempfile
from pathlib import Path

import numpy as np

from taxonomy_forge.decontam import (NGramBloom, build_filter, decontaminate,
                                     is_contaminated, normalize_tokens)
from taxonomy_forge.records import DocumentRecord

# ---------------------------------------------------------------
# Normalization makes matching robust to case and punctuation.
# ---------------------------------------------------------------

print(normalize_tokens("What is 7 * 6?  Answer: FORTY-two."))

# ---------------------------------------------------------------
# Build a filter over a small "benchmark": 200 synthetic questions.
# ---------------------------------------------------------------

rng = np.random.default_rng(99)
benchmark = [
    " ".join(f"question{q}token{t}" for t in range(16))
    for q in range(200)
]
bloom = build_filter(benchmark, width=13, target_fp=1e-6, seed=0)
print(f"\nfilter: {bloom.m} bits, {bloom.k} probes per n-gram, "
      f"width {bloom.width}")

# ---------------------------------------------------------------
# A document quoting 13 consecutive benchmark tokens is flagged; one
# stopping at 12 is not. The hit count reports how many windows
# matched.
# ---------------------------------------------------------------

padding = " ".join(f"lecture word {i}" for i in range(30))
quoting = padding + " " + " ".join(
    f"question17token{t}" for t in range(13)) + " " + padding
brushing = padding + " " + " ".join(
    f"question17token{t}" for t in range(12)) + " " + padding

flagged, hits = is_contaminated(quoting, bloom)
print(f"\n13-token quote: flagged={flagged} (windows hit: {hits})")
flagged, hits = is_contaminated(brushing, bloom)
print(f"12-token quote: flagged={flagged} (windows hit: {hits})")

# hit_threshold trades recall for tolerance of incidental overlap.
flagged, hits = is_contaminated(quoting, bloom, hit_threshold=2)
print(f"13-token quote at hit_threshold=2: flagged={flagged}")

# ---------------------------------------------------------------
# Streaming decontamination over records.
# ---------------------------------------------------------------

clean_docs = [
    DocumentRecord(text=" ".join(f"clean{i}w{j}" for j in range(40)))
    for i in range(500)
]
leaked = [DocumentRecord(text=quoting)]
kept, stats = decontaminate(clean_docs + leaked, bloom)
kept = list(kept)
print(f"\ndecontaminate: {stats.n_in} in, {stats.n_out} out, "
      f"{stats.n_dropped} dropped")

# ---------------------------------------------------------------
# The false-positive rate is a property of the sizing, not luck.
# Probing with novel keys shows the dial works: a filter sized for
# 1e-3 lands on it, and the 1e-6 production setting stays in single
# digits over two million probes.
# ---------------------------------------------------------------

probes = [b"never-inserted-%d" % n for n in range(2_000_000)]
loose = build_filter(benchmark, width=13, target_fp=1e-3, seed=0)
fp = int(loose.contains_many(probes).sum())
print(f"\nsized for 1e-3: {fp / len(probes):.2e} measured "
      f"({fp:,} hits per {len(probes):,} novel probes)")
fp = int(bloom.contains_many(probes).sum())
print(f"sized for 1e-6: {fp} hits per {len(probes):,} "
      f"(expect low single digits)")

# ---------------------------------------------------------------
# Filters persist as a small binary blob, so one build serves many
# decontamination jobs.
# ---------------------------------------------------------------

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "benchmark.bloom"
    bloom.save(path)
    reloaded = NGramBloom.load(path)
    print(f"\nsaved {path.stat().st_size:,} bytes; "
          f"round trip intact: {reloaded.to_bytes() == bloom.to_bytes()}")
    print("reloaded filter still flags the quote:",
          is_contaminated(quoting, reloaded)[0])
