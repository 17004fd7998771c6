"""Domain recall of a filter against human-vetted gold URL prefixes.

A gold set is a list of base-URL prefixes with a high density of
in-domain pages. For a corpus D, gold subset D+ (documents whose URL
starts with a gold prefix) and filter output D^, the report carries

    recall = |D^ intersect D+| / |D+|      (coverage of trusted pages)
    kept   = |D^| / |D|                    (overall data retained)

URLs are normalized before prefix comparison: the http/https scheme
and a single leading "www." are stripped and the host is lowercased,
so schemeless gold entries match scheme-bearing URLs and vice versa.
Documents without a URL count toward |D| only.

Two vetted gold sets ship with the package: "math" and "web-code".
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable

from .records import DocumentRecord

__all__ = [
    "GoldUrlSet",
    "RecallReport",
    "normalize_url",
    "match_gold",
    "recall_and_kept",
    "load_gold_set",
    "BUILTIN_GOLD_SETS",
]

BUILTIN_GOLD_SETS = {
    "math": "gold_math_urls.txt",
    "web-code": "gold_code_urls.txt",
}


def normalize_url(url: str) -> str:
    """Canonical form for prefix matching: drop the http/https scheme,
    lowercase the host, and strip one leading "www."."""
    u = url.strip()
    low = u.lower()
    for scheme in ("https://", "http://"):
        if low.startswith(scheme):
            u = u[len(scheme):]
            break
    host, sep, rest = u.partition("/")
    host = host.lower()
    if host.startswith("www."):
        host = host[4:]
    return host + sep + rest


@dataclass(frozen=True)
class GoldUrlSet:
    """Named set of vetted base-URL prefixes, stored normalized."""

    name: str
    base_urls: tuple[str, ...]

    def __post_init__(self) -> None:
        normalized = tuple(normalize_url(u) for u in self.base_urls)
        if any(not u for u in normalized):
            raise ValueError("gold URL prefixes must be nonempty")
        object.__setattr__(self, "base_urls", normalized)

    @classmethod
    def from_lines(cls, lines: Iterable[str], name: str) -> "GoldUrlSet":
        urls = []
        for line in lines:
            entry = line.strip()
            if entry and not entry.startswith("#"):
                urls.append(entry)
        return cls(name=name, base_urls=tuple(urls))

    @classmethod
    def from_file(cls, path, name: str | None = None) -> "GoldUrlSet":
        """Load one base URL per line; blank lines and '#' comments skipped."""
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh, name or str(path))


def load_gold_set(name: str) -> GoldUrlSet:
    """Load a built-in vetted gold set ("math" or "web-code")."""
    try:
        filename = BUILTIN_GOLD_SETS[name]
    except KeyError:
        raise ValueError(
            f"unknown gold set {name!r}; available: {sorted(BUILTIN_GOLD_SETS)}")
    ref = resources.files("taxonomy_forge").joinpath("data", filename)
    return GoldUrlSet.from_lines(ref.read_text(encoding="utf-8").splitlines(), name)


def match_gold(url: str, gold: GoldUrlSet) -> bool:
    """True iff the normalized URL starts with any gold prefix."""
    nu = normalize_url(url)
    return any(nu.startswith(prefix) for prefix in gold.base_urls)


@dataclass(frozen=True)
class RecallReport:
    """Recall/kept ratios with the raw counts they derive from."""

    recall: float
    kept: float
    n_total: int
    n_gold: int
    n_kept: int
    n_kept_gold: int


def recall_and_kept(records: Iterable[DocumentRecord],
                    keep: Callable[[DocumentRecord], bool],
                    gold: GoldUrlSet) -> RecallReport:
    """Single-pass recall and data-kept measurement for a filter.

    ``keep`` is any record predicate (a FilterExpr evaluates directly).
    Raises when the corpus contains no gold documents, since recall is
    undefined there.
    """
    n_total = n_gold = n_kept = n_kept_gold = 0
    for record in records:
        n_total += 1
        is_gold = record.url is not None and match_gold(record.url, gold)
        kept = bool(keep(record))
        n_gold += is_gold
        n_kept += kept
        n_kept_gold += is_gold and kept
    if n_total == 0:
        raise ValueError("empty corpus")
    if n_gold == 0:
        raise ValueError(f"no documents match gold set {gold.name!r}; "
                         "recall is undefined")
    return RecallReport(recall=n_kept_gold / n_gold, kept=n_kept / n_total,
                        n_total=n_total, n_gold=n_gold, n_kept=n_kept,
                        n_kept_gold=n_kept_gold)
