"""Benchmark decontamination with an n-gram Bloom filter.

Evaluation documents are normalized (lowercase, punctuation and symbol
characters to spaces, whitespace tokenization) and every sliding
13-gram is inserted into a Bloom filter sized for a target false
positive rate:

    m = ceil(-n * ln(fp) / ln(2)^2)      bits
    k = max(1, round(m / n * ln(2)))     hash functions

Membership uses double hashing: two 64-bit digests of the space-joined
n-gram under distinct seeds (the second forced odd), probing bit
indices (h1 + j*h2) mod m for j in 0..k-1, with the sum wrapping mod
2^64 first. Inserted n-grams always query true; absent n-grams query
true with probability about fp. A training document is contaminated
when at least ``hit_threshold`` of its n-grams are present, and
contaminated documents are dropped whole.

Filters serialize to a fixed little-endian header plus the raw bit
array (LSB-first within each byte), so a filter built once can be
reused bit-exactly across runs. Shards built from disjoint document
sets with identical geometry combine by OR-ing bit arrays.
"""

from __future__ import annotations

import math
import struct
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
import xxhash

from .dedup import StageStats
from .records import DocumentRecord

__all__ = [
    "normalize_tokens",
    "NGramBloom",
    "build_filter",
    "is_contaminated",
    "decontaminate",
    "DEFAULT_NGRAM_WIDTH",
    "DEFAULT_TARGET_FP",
]

DEFAULT_NGRAM_WIDTH = 13
DEFAULT_TARGET_FP = 1e-6


class _PunctTable(dict):
    """Lazy str.translate table: Unicode punctuation (P*) and symbol
    (S*) code points map to a space, everything else to itself."""

    def __missing__(self, code_point: int) -> int:
        mapped = code_point
        if unicodedata.category(chr(code_point))[0] in "PS":
            mapped = 0x20
        self[code_point] = mapped
        return mapped


_PUNCT_TABLE = _PunctTable()


def normalize_tokens(text: str) -> list[str]:
    """Lowercase, replace punctuation and symbols with spaces, and
    split on whitespace (str.split collapses runs)."""
    return text.lower().translate(_PUNCT_TABLE).split()


def _iter_ngram_keys(tokens: list[str], width: int) -> Iterator[bytes]:
    if len(tokens) < width:
        return
    encoded = [t.encode("utf-8") for t in tokens]
    for i in range(len(encoded) - width + 1):
        yield b" ".join(encoded[i:i + width])


_HEADER = struct.Struct("<4sIQIIQQQ")
_MAGIC = b"NGBF"
_VERSION = 1


def _avalanche(v: np.ndarray) -> np.ndarray:
    """64-bit finalizer (MurmurHash3). Double hashing alone leaves the k
    probe indices on an arithmetic progression, which correlates them
    enough to inflate the false-positive rate well past the sizing
    target when the bit array is small; avalanching each lane restores
    effectively independent indices."""
    v = v ^ (v >> np.uint64(33))
    v = v * np.uint64(0xFF51AFD7ED558CCD)
    v = v ^ (v >> np.uint64(33))
    v = v * np.uint64(0xC4CEB9FE1A85EC53)
    return v ^ (v >> np.uint64(33))


class NGramBloom:
    """Bloom filter over fixed-width token n-grams.

    No false negatives, ever; false positives at roughly the rate the
    filter was sized for. ``count`` tracks insert operations performed
    (build_filter inserts each distinct n-gram once).
    """

    def __init__(self, m: int, k: int, width: int = DEFAULT_NGRAM_WIDTH, *,
                 seed1: int = 0, seed2: int = 1, count: int = 0,
                 bits: np.ndarray | None = None) -> None:
        if m <= 0 or k <= 0:
            raise ValueError("m and k must be positive")
        if width < 1:
            raise ValueError("width must be at least 1")
        self.m = int(m)
        self.k = int(k)
        self.width = int(width)
        self.seed1 = int(seed1) & 0xFFFFFFFFFFFFFFFF
        self.seed2 = int(seed2) & 0xFFFFFFFFFFFFFFFF
        self.count = int(count)
        n_bytes = (self.m + 7) // 8
        if bits is None:
            self.bits = np.zeros(n_bytes, dtype=np.uint8)
        else:
            bits = np.asarray(bits, dtype=np.uint8)
            if bits.size != n_bytes:
                raise ValueError(
                    f"bit array holds {bits.size} bytes, need {n_bytes}")
            self.bits = bits.copy()

    @classmethod
    def with_capacity(cls, n_items: int, target_fp: float,
                      width: int = DEFAULT_NGRAM_WIDTH,
                      seed: int = 0) -> "NGramBloom":
        """Size for ``n_items`` insertions at ``target_fp``."""
        if not 0.0 < target_fp < 1.0:
            raise ValueError(f"target_fp must be in (0, 1), got {target_fp}")
        if n_items < 1:
            raise ValueError("n_items must be at least 1")
        ln2 = math.log(2.0)
        m = math.ceil(-n_items * math.log(target_fp) / (ln2 * ln2))
        k = max(1, round(m / n_items * ln2))
        seed1 = xxhash.xxh3_64_intdigest(b"ngram-bloom-h1", seed=seed)
        seed2 = xxhash.xxh3_64_intdigest(b"ngram-bloom-h2", seed=seed)
        return cls(m, k, width, seed1=seed1, seed2=seed2)

    def _hash_pair(self, key: bytes) -> tuple[int, int]:
        h1 = xxhash.xxh3_64_intdigest(key, seed=self.seed1)
        h2 = xxhash.xxh3_64_intdigest(key, seed=self.seed2) | 1
        return h1, h2

    def _indices(self, key: bytes) -> np.ndarray:
        h1, h2 = self._hash_pair(key)
        steps = np.arange(self.k, dtype=np.uint64)
        mixed = _avalanche(np.uint64(h1) + steps * np.uint64(h2))
        return mixed % np.uint64(self.m)

    def add_key(self, key: bytes) -> None:
        idx = self._indices(key)
        np.bitwise_or.at(self.bits, (idx >> np.uint64(3)).astype(np.intp),
                         np.left_shift(np.uint8(1),
                                       (idx & np.uint64(7)).astype(np.uint8)))
        self.count += 1

    def __contains__(self, key: bytes) -> bool:
        idx = self._indices(key)
        probed = self.bits[(idx >> np.uint64(3)).astype(np.intp)]
        mask = np.left_shift(np.uint8(1), (idx & np.uint64(7)).astype(np.uint8))
        return bool(np.all(probed & mask))

    def contains_many(self, keys: Iterable[bytes]) -> np.ndarray:
        """Vectorized membership: one boolean per key, in order."""
        key_list = list(keys)
        if not key_list:
            return np.zeros(0, dtype=bool)
        h1 = np.fromiter(
            (xxhash.xxh3_64_intdigest(key, seed=self.seed1)
             for key in key_list),
            count=len(key_list), dtype=np.uint64)
        h2 = np.fromiter(
            (xxhash.xxh3_64_intdigest(key, seed=self.seed2) | 1
             for key in key_list),
            count=len(key_list), dtype=np.uint64)
        steps = np.arange(self.k, dtype=np.uint64)
        idx = _avalanche(h1[:, None] + steps[None, :] * h2[:, None]) \
            % np.uint64(self.m)
        probed = self.bits[(idx >> np.uint64(3)).astype(np.intp)]
        mask = np.left_shift(np.uint8(1), (idx & np.uint64(7)).astype(np.uint8))
        return np.all(probed & mask, axis=1)

    def add_document(self, text: str) -> int:
        """Insert every sliding n-gram of the normalized text; returns
        the number of windows inserted."""
        inserted = 0
        for key in _iter_ngram_keys(normalize_tokens(text), self.width):
            self.add_key(key)
            inserted += 1
        return inserted

    def merged(self, other: "NGramBloom") -> "NGramBloom":
        """OR-combine two shards built with identical geometry and seeds."""
        if (self.m, self.k, self.width, self.seed1, self.seed2) != \
                (other.m, other.k, other.width, other.seed1, other.seed2):
            raise ValueError("cannot merge filters with different parameters")
        return NGramBloom(self.m, self.k, self.width,
                          seed1=self.seed1, seed2=self.seed2,
                          count=self.count + other.count,
                          bits=self.bits | other.bits)

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(_MAGIC, _VERSION, self.m, self.k, self.width,
                              self.seed1, self.seed2, self.count)
        return header + self.bits.tobytes()

    @classmethod
    def from_bytes(cls, payload: bytes) -> "NGramBloom":
        if len(payload) < _HEADER.size:
            raise ValueError("truncated filter payload")
        magic, version, m, k, width, seed1, seed2, count = _HEADER.unpack(
            payload[:_HEADER.size])
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {_MAGIC!r}")
        if version != _VERSION:
            raise ValueError(f"unsupported filter version {version}")
        bits = np.frombuffer(payload[_HEADER.size:], dtype=np.uint8)
        if bits.size != (m + 7) // 8:
            raise ValueError("bit array length does not match header")
        return cls(m, k, width, seed1=seed1, seed2=seed2, count=count,
                   bits=bits)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "NGramBloom":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def build_filter(eval_docs: Iterable[str],
                 width: int = DEFAULT_NGRAM_WIDTH,
                 target_fp: float = DEFAULT_TARGET_FP,
                 seed: int = 0) -> NGramBloom:
    """Build a filter holding every sliding n-gram of every eval doc.

    Collects the distinct n-grams first so the filter can be sized for
    the observed count, then inserts each once. Raises ValueError when
    no document yields a full-width n-gram.
    """
    keys: set[bytes] = set()
    for doc in eval_docs:
        keys.update(_iter_ngram_keys(normalize_tokens(doc), width))
    if not keys:
        raise ValueError(
            f"no {width}-grams found: every document has fewer than "
            f"{width} tokens")
    bloom = NGramBloom.with_capacity(len(keys), target_fp, width, seed)
    for key in sorted(keys):
        bloom.add_key(key)
    return bloom


def is_contaminated(text: str, bloom: NGramBloom,
                    hit_threshold: int = 1) -> tuple[bool, int]:
    """Slide the filter's n-gram window over the normalized document;
    contaminated iff at least ``hit_threshold`` windows are present."""
    if hit_threshold < 1:
        raise ValueError("hit_threshold must be at least 1")
    keys = list(_iter_ngram_keys(normalize_tokens(text), bloom.width))
    if not keys:
        return False, 0
    hits = int(bloom.contains_many(keys).sum())
    return hits >= hit_threshold, hits


def decontaminate(records: Iterable[DocumentRecord], bloom: NGramBloom, *,
                  hit_threshold: int = 1
                  ) -> tuple[Iterator[DocumentRecord], StageStats]:
    """Drop contaminated records, streaming; idempotent because a kept
    record stays clean against an unchanged filter."""
    stats = StageStats()

    def gen() -> Iterator[DocumentRecord]:
        for record in records:
            stats.n_in += 1
            flagged, _ = is_contaminated(record.text, bloom, hit_threshold)
            if flagged:
                continue
            stats.n_out += 1
            yield record

    return gen(), stats
