"""Exact and near-duplicate document removal.

Exact dedup drops later occurrences of an id, streaming. Near-duplicate
detection sketches each document with MinHash over lowercased word
shingles and groups candidates by locality-sensitive banding: the
126-value signature is split into 14 bands of 9 rows, and two documents
become candidates when any band collides, which happens with
probability 1 - (1 - s^9)^14 at shingle Jaccard s (about 0.44 at the
0.7 design threshold). Candidates are clustered with union-find and one
representative per cluster survives: the record with the smallest id,
so results do not depend on input order.

Each permutation is a multiply-xor of one 64-bit base shingle hash with
constants drawn from a seeded generator, finished with an avalanche
mix, so signatures are deterministic in (text, params) without hashing
the text 126 times.
"""

from __future__ import annotations

import struct
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator

import numpy as np
import xxhash

from .records import DocumentRecord

__all__ = [
    "MinHashParams",
    "MinHashSignature",
    "StageStats",
    "ClusterStats",
    "exact_dedup",
    "minhash_signature",
    "signature_similarity",
    "lsh_band_keys",
    "cluster_and_select",
    "jaccard",
    "UnionFind",
]


@dataclass(frozen=True)
class MinHashParams:
    """LSH geometry and shingling configuration."""

    num_perms: int = 126
    bands: int = 14
    rows: int = 9
    shingle_width: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.bands * self.rows != self.num_perms:
            raise ValueError(
                f"bands*rows must equal num_perms: {self.bands}*{self.rows} "
                f"!= {self.num_perms}")
        if self.shingle_width < 1:
            raise ValueError("shingle_width must be at least 1")


@dataclass(frozen=True, eq=False)
class MinHashSignature:
    """Per-document sketch: one minimum per permutation.

    A document with no shingles (fewer words than the shingle width)
    gets the all-ones sentinel, which only ever collides with other
    empty documents; that matches jaccard's both-empty convention of 1.
    """

    values: np.ndarray
    n_shingles: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.uint64)
        object.__setattr__(self, "values", values)


@dataclass
class StageStats:
    """Mutable in/out counters, filled as a streaming stage is consumed."""

    n_in: int = 0
    n_out: int = 0

    @property
    def n_dropped(self) -> int:
        return self.n_in - self.n_out


def exact_dedup(records: Iterable[DocumentRecord]
                ) -> tuple[Iterator[DocumentRecord], StageStats]:
    """Keep the first occurrence of each id, dropping the rest.

    Returns a lazy stream plus its stats object; the stats are complete
    once the stream is exhausted. Idempotent by construction.
    """
    stats = StageStats()

    def gen() -> Iterator[DocumentRecord]:
        seen: set[int] = set()
        for record in records:
            stats.n_in += 1
            if record.id in seen:
                continue
            seen.add(record.id)
            stats.n_out += 1
            yield record

    return gen(), stats


def _shingle_strings(text: str, width: int) -> Iterator[str]:
    words = text.lower().split()
    if len(words) < width:
        return
    for i in range(len(words) - width + 1):
        yield " ".join(words[i:i + width])


def jaccard(a: str, b: str, shingle_width: int = 5) -> float:
    """Exact Jaccard similarity of the two texts' shingle sets; 1 when
    both are empty (identical lack of content)."""
    sa = set(_shingle_strings(a, shingle_width))
    sb = set(_shingle_strings(b, shingle_width))
    union = sa | sb
    if not union:
        return 1.0
    return len(sa & sb) / len(union)


@lru_cache(maxsize=8)
def _perm_constants(params: MinHashParams) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.Generator(np.random.PCG64(params.seed))
    mul = rng.integers(0, 1 << 64, size=params.num_perms, dtype=np.uint64)
    mul |= np.uint64(1)
    xor = rng.integers(0, 1 << 64, size=params.num_perms, dtype=np.uint64)
    mul.setflags(write=False)
    xor.setflags(write=False)
    return mul, xor


def _fmix64(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(33))
    x = x * np.uint64(0xFF51AFD7ED558CCD)
    x = x ^ (x >> np.uint64(33))
    x = x * np.uint64(0xC4CEB9FE1A85EC53)
    return x ^ (x >> np.uint64(33))


_EMPTY_SENTINEL = np.uint64(0xFFFFFFFFFFFFFFFF)


def minhash_signature(text: str, params: MinHashParams = MinHashParams()
                      ) -> MinHashSignature:
    """Sketch a document's shingle set.

    The base hash of each distinct shingle is xored with a
    per-permutation constant, multiplied by an odd per-permutation
    constant, and avalanche-finished; the signature keeps the minimum
    per permutation.
    """
    hashes = {xxhash.xxh3_64_intdigest(s.encode("utf-8"))
              for s in _shingle_strings(text, params.shingle_width)}
    if not hashes:
        values = np.full(params.num_perms, _EMPTY_SENTINEL, dtype=np.uint64)
        return MinHashSignature(values=values, n_shingles=0)
    mul, xor = _perm_constants(params)
    base = np.fromiter(hashes, count=len(hashes), dtype=np.uint64)
    mixed = _fmix64((base[:, None] ^ xor[None, :]) * mul[None, :])
    return MinHashSignature(values=mixed.min(axis=0), n_shingles=len(hashes))


def signature_similarity(a: MinHashSignature, b: MinHashSignature) -> float:
    """Fraction of matching signature positions, an unbiased estimator
    of the shingle-set Jaccard similarity."""
    if a.values.shape != b.values.shape:
        raise ValueError("signatures have different lengths")
    return float((a.values == b.values).mean())


def lsh_band_keys(sig: MinHashSignature,
                  params: MinHashParams = MinHashParams()) -> list[int]:
    """One stable 64-bit key per band, hashing (band index, row values).

    Two documents are near-duplicate candidates iff any band key
    collides.
    """
    if sig.values.size != params.num_perms:
        raise ValueError("signature length does not match params")
    keys = []
    rows = params.rows
    for band in range(params.bands):
        chunk = sig.values[band * rows:(band + 1) * rows]
        payload = struct.pack("<H", band) + chunk.astype("<u8").tobytes()
        keys.append(xxhash.xxh3_64_intdigest(payload))
    return keys


class UnionFind:
    """Disjoint sets over hashable items, path-halving with union by size."""

    def __init__(self) -> None:
        self._parent: dict = {}
        self._size: dict = {}

    def find(self, item):
        parent = self._parent
        if item not in parent:
            parent[item] = item
            self._size[item] = 1
            return item
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]

    def groups(self) -> dict:
        out: dict = defaultdict(list)
        for item in self._parent:
            out[self.find(item)].append(item)
        return dict(out)


@dataclass
class ClusterStats:
    """Outcome counts for one near-duplicate clustering pass."""

    n_in: int = 0
    n_out: int = 0
    n_clusters: int = 0
    n_candidate_pairs: int = 0

    @property
    def n_dropped(self) -> int:
        return self.n_in - self.n_out


def cluster_and_select(records: Iterable[DocumentRecord],
                       params: MinHashParams = MinHashParams(), *,
                       verify: bool = False,
                       threshold: float = 0.7,
                       scope: Callable[[DocumentRecord], object] | None = None
                       ) -> tuple[list[DocumentRecord], ClusterStats]:
    """Cluster near-duplicate candidates and keep one record per cluster.

    Candidates sharing any LSH band key within the same scope (a
    grouping key such as a crawl snapshot; None means one global scope)
    are unioned. With ``verify`` each candidate pair is confirmed by
    exact shingle Jaccard >= threshold before union, trading speed for
    precision. The survivor of each cluster is the record with the
    smallest id, and survivors keep their input order. Records with ids
    already seen are dropped outright (run exact dedup first).
    """
    stats = ClusterStats()
    kept_records: list[DocumentRecord] = []
    by_id: dict[int, DocumentRecord] = {}
    buckets: dict[tuple, list[int]] = defaultdict(list)

    for record in records:
        stats.n_in += 1
        if record.id in by_id:
            continue
        by_id[record.id] = record
        kept_records.append(record)
        sig = minhash_signature(record.text, params)
        group = scope(record) if scope is not None else None
        for key in lsh_band_keys(sig, params):
            buckets[(group, key)].append(record.id)

    uf = UnionFind()
    checked: set[tuple[int, int]] = set()
    for ids in buckets.values():
        if len(ids) < 2:
            continue
        if not verify:
            first = ids[0]
            for other in ids[1:]:
                pair = (first, other) if first < other else (other, first)
                if pair not in checked:
                    checked.add(pair)
                    stats.n_candidate_pairs += 1
                uf.union(first, other)
            continue
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                pair = (a, b) if a < b else (b, a)
                if pair in checked:
                    continue
                checked.add(pair)
                stats.n_candidate_pairs += 1
                if jaccard(by_id[a].text, by_id[b].text,
                           params.shingle_width) >= threshold:
                    uf.union(a, b)

    cluster_min: dict[int, int] = {}
    for rec_id in by_id:
        root = uf.find(rec_id)
        best = cluster_min.get(root)
        if best is None or rec_id < best:
            cluster_min[root] = rec_id

    survivors = [r for r in kept_records if cluster_min[uf.find(r.id)] == r.id]
    stats.n_out = len(survivors)
    stats.n_clusters = sum(1 for ids in uf.groups().values() if len(ids) > 1)
    return survivors, stats
