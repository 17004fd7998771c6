"""Document records, content-addressed ids, JSONL I/O, and long-text chunking.

A record is one web document: a content-hash id, the text, an optional
URL, taxonomy annotations, optional quality signals, and optional
external classifier scores. Records serialize as one JSON object per
line; unrecognized top-level fields are carried through untouched.

Annotation model: every category stores a primary label code and an
optional secondary code that must differ from the primary. Abstention
is represented by the annotation being absent, never stored explicitly.
The three FDC levels are derived views of the stored ``fdc`` code (its
first 1, 2, or 3 characters), so twelve metric-layer categories map
onto ten stored annotation keys.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Iterator, Mapping, TextIO

import xxhash

from .signals import QualitySignals

__all__ = [
    "ANNOTATION_CATEGORIES",
    "METRIC_CATEGORIES",
    "CategoryAnnotation",
    "DocumentRecord",
    "RecordError",
    "doc_id",
    "chunk_text",
    "record_rng",
    "parse_record",
    "serialize_record",
    "read_records",
    "write_records",
    "primary_label",
    "label_set",
]

# Stored annotation keys: the FDC code plus nine label categories.
ANNOTATION_CATEGORIES = (
    "fdc",
    "bloom_cognitive_process",
    "bloom_knowledge_domain",
    "doc_type_v1",
    "doc_type_v2",
    "extraction_artifacts",
    "missing_content",
    "reasoning_depth",
    "technical_correctness",
    "education_level",
)

# Metric-layer categories: FDC split into its three nested levels.
METRIC_CATEGORIES = (
    "fdc_level_1",
    "fdc_level_2",
    "fdc_level_3",
    "bloom_cognitive_process",
    "bloom_knowledge_domain",
    "doc_type_v1",
    "doc_type_v2",
    "extraction_artifacts",
    "missing_content",
    "reasoning_depth",
    "technical_correctness",
    "education_level",
)

_VALID_ANNOTATION_KEYS = frozenset(ANNOTATION_CATEGORIES) | frozenset(METRIC_CATEGORIES)


class RecordError(ValueError):
    """Malformed record; carries the 1-based input line number when known."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class CategoryAnnotation:
    """One category's labels: a primary code and an optional distinct secondary."""

    primary: str
    secondary: str | None = None
    extra: Mapping[str, Any] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.primary, str) or not self.primary:
            raise ValueError("primary label code must be a nonempty string")
        if self.secondary is not None:
            if not isinstance(self.secondary, str) or not self.secondary:
                raise ValueError("secondary label code must be a nonempty string")
            if self.secondary == self.primary:
                raise ValueError(
                    f"secondary label {self.secondary!r} must differ from primary")


@dataclass(frozen=True)
class DocumentRecord:
    """One document. Immutable; use dataclasses.replace to derive variants."""

    text: str
    id: int | None = None
    url: str | None = None
    annotations: Mapping[str, CategoryAnnotation] = field(default_factory=dict)
    signals: QualitySignals | None = None
    scores: Mapping[str, float] = field(default_factory=dict)
    extra: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.id is None:
            object.__setattr__(self, "id", doc_id(self.text))
        elif not 0 <= self.id < 1 << 64:
            raise ValueError(f"id {self.id} outside unsigned 64-bit range")
        for name in self.annotations:
            if name not in _VALID_ANNOTATION_KEYS:
                raise ValueError(f"unknown annotation category {name!r}")

    def with_signals(self, signals: QualitySignals) -> "DocumentRecord":
        return replace(self, signals=signals)


def doc_id(text: str | bytes) -> int:
    """Content-addressed 64-bit document id: the xxh3-64 digest of the
    UTF-8 bytes. Stable across runs and platforms."""
    data = text.encode("utf-8") if isinstance(text, str) else text
    return xxhash.xxh3_64_intdigest(data)


def chunk_text(text: str, max_chars: int, rng: random.Random) -> str:
    """Reduce an over-long text to three marked excerpts.

    Text within the budget is returned unchanged. Otherwise the output
    is "[beginning]\\n{start}\\n[middle]\\n{middle}\\n[end]\\n{end}" where
    start and end are the first and last max_chars//3 characters and
    middle is a contiguous window of the same size whose center is drawn
    uniformly from the positions that keep it clear of both ends. The
    markers add exactly 29 characters.
    """
    if max_chars < 9:
        raise ValueError("max_chars must be at least 9 so all thirds are nonempty")
    if len(text) <= max_chars:
        return text
    chunk_size = max_chars // 3
    start = text[:chunk_size]
    mid_point = rng.randint(chunk_size + chunk_size // 2,
                            len(text) - chunk_size - chunk_size // 2)
    middle = text[mid_point - chunk_size // 2:mid_point + chunk_size // 2]
    end = text[-chunk_size:]
    return f"[beginning]\n{start}\n[middle]\n{middle}\n[end]\n{end}"


def record_rng(seed: int, record_id: int) -> random.Random:
    """Per-record random source: deterministic in (seed, id) and
    independent of worker count or input order."""
    return random.Random(f"{seed}:{record_id}")


def _parse_label(value: Any, where: str) -> str:
    """Accept either a bare code string or an object with a 'code' key."""
    if isinstance(value, str):
        return value
    if isinstance(value, dict) and isinstance(value.get("code"), str):
        return value["code"]
    raise ValueError(f"{where} must be a label code string or an object with 'code'")


def _parse_annotation(name: str, value: Any) -> CategoryAnnotation:
    if isinstance(value, str):
        return CategoryAnnotation(primary=value)
    if not isinstance(value, dict):
        raise ValueError(f"annotation {name!r} must be a string or object")
    data = dict(value)
    if "primary" not in data:
        raise ValueError(f"annotation {name!r} missing primary label")
    primary = _parse_label(data.pop("primary"), f"{name}.primary")
    secondary = data.pop("secondary", None)
    if secondary is not None:
        secondary = _parse_label(secondary, f"{name}.secondary")
    return CategoryAnnotation(primary=primary, secondary=secondary,
                              extra=data or None)


def parse_record(line: str, line_number: int | None = None) -> DocumentRecord:
    """Parse one serialized record line.

    Raises RecordError (carrying the line number) on malformed JSON, a
    missing or non-string text field, or schema-invalid annotations.
    Unknown top-level fields are preserved for pass-through.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise RecordError(f"invalid JSON: {e}", line_number) from e
    if not isinstance(obj, dict):
        raise RecordError("record must be a JSON object", line_number)

    data = dict(obj)
    text = data.pop("text", None)
    if not isinstance(text, str):
        raise RecordError("record missing string 'text' field", line_number)

    try:
        rec_id = data.pop("id", None)
        if rec_id is not None and not isinstance(rec_id, int):
            raise ValueError("id must be an integer")
        url = data.pop("url", None)
        if url is not None and not isinstance(url, str):
            raise ValueError("url must be a string")

        annotations: dict[str, CategoryAnnotation] = {}
        raw_ann = data.pop("eai_taxonomy", None)
        if raw_ann is not None:
            if not isinstance(raw_ann, dict):
                raise ValueError("eai_taxonomy must be an object")
            for name, value in raw_ann.items():
                annotations[name] = _parse_annotation(name, value)

        signals = None
        raw_sig = data.pop("quality_signals", None)
        if raw_sig is not None:
            if not isinstance(raw_sig, dict):
                raise ValueError("quality_signals must be an object")
            signals = QualitySignals.from_dict(raw_sig)

        scores: dict[str, float] = {}
        raw_scores = data.pop("scores", None)
        if raw_scores is not None:
            if not isinstance(raw_scores, dict):
                raise ValueError("scores must be an object")
            for k, v in raw_scores.items():
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise ValueError(f"score {k!r} must be numeric")
                scores[k] = float(v)

        return DocumentRecord(text=text, id=rec_id, url=url,
                              annotations=annotations, signals=signals,
                              scores=scores, extra=data)
    except RecordError:
        raise
    except (ValueError, TypeError) as e:
        raise RecordError(str(e), line_number) from e


def serialize_record(record: DocumentRecord) -> str:
    """Serialize to one canonical JSON line (sorted keys, no padding),
    so equal records always produce identical bytes."""
    obj: dict[str, Any] = {"id": record.id, "text": record.text}
    if record.url is not None:
        obj["url"] = record.url
    if record.annotations:
        ann: dict[str, Any] = {}
        for name, a in record.annotations.items():
            entry: dict[str, Any] = {"primary": {"code": a.primary}}
            if a.secondary is not None:
                entry["secondary"] = {"code": a.secondary}
            if a.extra:
                for k, v in a.extra.items():
                    entry.setdefault(k, v)
            ann[name] = entry
        obj["eai_taxonomy"] = ann
    if record.signals is not None:
        obj["quality_signals"] = record.signals.to_dict()
    if record.scores:
        obj["scores"] = dict(record.scores)
    for k, v in record.extra.items():
        obj.setdefault(k, v)
    return json.dumps(obj, ensure_ascii=False, sort_keys=True,
                      separators=(",", ":"))


def read_records(stream: TextIO | Iterable[str]) -> Iterator[DocumentRecord]:
    """Yield records from newline-delimited JSON, skipping blank lines.
    Raises RecordError with the offending 1-based line number."""
    for line_number, line in enumerate(stream, start=1):
        if line.strip():
            yield parse_record(line, line_number)


def write_records(records: Iterable[DocumentRecord], stream: TextIO) -> int:
    """Write records one JSON object per line; returns the count written."""
    n = 0
    for record in records:
        stream.write(serialize_record(record))
        stream.write("\n")
        n += 1
    return n


def primary_label(record: DocumentRecord, category: str) -> str | None:
    """The record's primary label for a metric-layer category, or None.

    FDC level categories are derived by truncating the stored fdc code
    to its first 1, 2, or 3 characters; a directly stored level
    annotation takes precedence. Codes are trimmed of surrounding
    whitespace before comparison anywhere labels are compared.
    """
    ann = record.annotations.get(category)
    if ann is not None:
        return ann.primary.strip()
    if category.startswith("fdc_level_"):
        base = record.annotations.get("fdc")
        if base is None:
            return None
        level = int(category.rsplit("_", 1)[1])
        return base.primary.strip()[:level] or None
    return None


def label_set(record: DocumentRecord, category: str) -> frozenset[str]:
    """Both assigned labels for a metric-layer category, as a set.

    Collects primary and secondary (when present), applying the same
    FDC level truncation as primary_label; empty set when the record
    lacks the category.
    """
    ann = record.annotations.get(category)
    level = None
    if ann is None and category.startswith("fdc_level_"):
        ann = record.annotations.get("fdc")
        level = int(category.rsplit("_", 1)[1])
    if ann is None:
        return frozenset()
    labels = []
    for raw in (ann.primary, ann.secondary):
        if raw is None:
            continue
        code = raw.strip()
        if level is not None:
            code = code[:level]
        if code:
            labels.append(code)
    return frozenset(labels)
