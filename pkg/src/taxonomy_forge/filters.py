"""Filter expressions over document records, with preset dataset filters.

A filter is an immutable predicate tree. Leaves test one field:
comparison against a number or string, membership of a label in a set,
code-prefix membership (some key is a character prefix of the code,
optionally after truncating the code to an explicit length), or an
absence test. Internal nodes are and/or/not. Absent fields fail every
comparison and membership and succeed absence tests, so a negated
blacklist membership passes on records lacking the field.

Expressions have a textual form::

    fdc.primary prefix_in {"51"} and doc_type_v1.primary in {"Social/Forum"}
    quality_signals.rps_doc_ml_eli5_score > 0.01811
    finemath_score >= 3.25 and not (doc_type_v2.primary in {"Spam / Ads"})
    fdc.primary prefix_in(5) {"005.1", "005.4"} or url is absent
    @top-math and scores.extra_score < 1.0

Operator precedence is or < and < not. ``x not in {...}`` is sugar for
``not (x in {...})``. ``@name`` references a preset. Field paths
resolve against the record schema at parse time:

    id | text | url
    [eai_taxonomy.]<category>.<primary|secondary>[.code]
    quality_signals.<signal name>
    scores.<score name>
    <name>_score            (searches scores, signals, then extra)

``dds`` is accepted as an alias for the ``fdc`` category, and the
derived ``fdc_level_1/2/3`` categories resolve to truncated fdc codes.

The eight presets transliterate the curation recipes for the released
dataset variants; ``preset(name)`` returns the tree and ``PRESET_NAMES``
lists them.
"""

from __future__ import annotations

import dataclasses
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from numbers import Real
from typing import Iterable, Iterator, Union

from .records import ANNOTATION_CATEGORIES, DocumentRecord
from .signals import QualitySignals

__all__ = [
    "FieldPath",
    "Cmp",
    "InSet",
    "PrefixIn",
    "IsAbsent",
    "And",
    "Or",
    "Not",
    "FilterExpr",
    "FilterError",
    "FilterStats",
    "prefix_match",
    "evaluate",
    "explain",
    "run_filter",
    "parse_filter",
    "to_text",
    "preset",
    "PRESET_NAMES",
    "DCLM_BASELINE_THRESH",
]


class FilterError(ValueError):
    """Raised for unparseable or schema-invalid filter expressions."""


_SIGNAL_FIELDS = frozenset(
    f.name for f in dataclasses.fields(QualitySignals)) - {"extras"}
_FDC_LEVELS = {"fdc_level_1": 1, "fdc_level_2": 2, "fdc_level_3": 3}
_POSITIONS = ("primary", "secondary")
_CATEGORY_ALIASES = {"dds": "fdc"}


@dataclass(frozen=True)
class FieldPath:
    """A validated dotted field path; construction rejects paths that
    cannot resolve against the record schema."""

    dotted: str
    _kind: str = field(init=False, compare=False, repr=False)
    _parts: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        kind, parts, dotted = _normalize_path(self.dotted)
        object.__setattr__(self, "dotted", dotted)
        object.__setattr__(self, "_kind", kind)
        object.__setattr__(self, "_parts", parts)

    def resolve(self, record: DocumentRecord):
        """The field's value on this record, or None when absent."""
        kind = self._kind
        if kind == "builtin":
            return getattr(record, self._parts[0])
        if kind == "annotation":
            return _annotation_label(record, *self._parts)
        if kind == "signal":
            signals = record.signals
            return signals.get(self._parts[0]) if signals else None
        if kind == "score":
            return record.scores.get(self._parts[0])
        name = self._parts[0]
        value = record.scores.get(name)
        if value is None and record.signals is not None:
            value = record.signals.get(name)
        if value is None:
            value = record.extra.get(name)
        return value


def _normalize_path(dotted: str) -> tuple[str, tuple, str]:
    parts = tuple(dotted.split("."))
    if not all(parts):
        raise FilterError(f"malformed field path {dotted!r}")
    if parts[0] == "eai_taxonomy":
        parts = parts[1:]
    if len(parts) == 1:
        name = parts[0]
        if name in ("id", "text", "url"):
            return "builtin", (name,), name
        if name.endswith("_score"):
            return "auto_score", (name,), name
        raise FilterError(
            f"unknown field {name!r}: bare names must be id, text, url, "
            f"or end in _score")
    head = parts[0]
    if head == "quality_signals":
        if len(parts) != 2:
            raise FilterError(f"quality_signals path takes one name: {dotted!r}")
        return "signal", (parts[1],), ".".join(parts)
    if head == "scores":
        if len(parts) != 2:
            raise FilterError(f"scores path takes one name: {dotted!r}")
        return "score", (parts[1],), ".".join(parts)
    category = _CATEGORY_ALIASES.get(head, head)
    if category in ANNOTATION_CATEGORIES or category in _FDC_LEVELS:
        rest = parts[1:]
        if rest and rest[-1] == "code":
            rest = rest[:-1]
        if len(rest) != 1 or rest[0] not in _POSITIONS:
            raise FilterError(
                f"annotation path must be <category>.<primary|secondary>"
                f"[.code]: {dotted!r}")
        return "annotation", (category, rest[0]), f"{category}.{rest[0]}"
    raise FilterError(f"unknown field path {dotted!r}")


def _annotation_label(record: DocumentRecord, category: str,
                      position: str) -> str | None:
    level = _FDC_LEVELS.get(category)
    annotation = record.annotations.get("fdc" if level else category)
    if annotation is None:
        return None
    label = annotation.primary if position == "primary" else annotation.secondary
    if label is None:
        return None
    if level is not None:
        label = label.strip()[:level]
    return label or None


def prefix_match(code: str | None, keys: Iterable[str],
                 length: int | None = None) -> bool:
    """True iff some key is a character prefix of the code.

    An explicit length truncates the code first, so with equal-length
    keys the test becomes equality on that many leading characters.
    Absent code never matches.
    """
    if code is None:
        return False
    if length is not None:
        code = code[:length]
    return any(code.startswith(key) for key in keys)


_CMP_OPS = ("<", ">", "<=", ">=", "==", "!=")
_ORDERED_OPS = frozenset(("<", ">", "<=", ">="))


class _Predicate:
    """Expression nodes are callable, so a FilterExpr drops in anywhere
    a record predicate is expected."""

    def __call__(self, record: "DocumentRecord") -> bool:
        return evaluate(self, record)


@dataclass(frozen=True)
class Cmp(_Predicate):
    """Compare a field against a literal; absent or type-mismatched
    values fail."""

    path: FieldPath
    op: str
    value: float | int | str

    def __post_init__(self) -> None:
        if self.op not in _CMP_OPS:
            raise FilterError(f"unknown comparison operator {self.op!r}")
        if isinstance(self.value, str) and self.op in _ORDERED_OPS:
            raise FilterError(
                f"ordered comparison {self.op!r} requires a numeric literal")


@dataclass(frozen=True)
class InSet(_Predicate):
    """Label membership; absent fails."""

    path: FieldPath
    values: frozenset[str]

    def __post_init__(self) -> None:
        values = frozenset(self.values)
        if not values:
            raise FilterError("membership set must be nonempty")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class PrefixIn(_Predicate):
    """Code-prefix membership; absent fails."""

    path: FieldPath
    keys: frozenset[str]
    length: int | None = None

    def __post_init__(self) -> None:
        keys = frozenset(self.keys)
        if not keys or any(not k for k in keys):
            raise FilterError("prefix keys must be nonempty strings")
        if self.length is not None and self.length < 1:
            raise FilterError("explicit prefix length must be positive")
        object.__setattr__(self, "keys", keys)


@dataclass(frozen=True)
class IsAbsent(_Predicate):
    """True iff the field is missing on the record."""

    path: FieldPath


@dataclass(frozen=True)
class And(_Predicate):
    children: tuple["FilterExpr", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 1:
            raise FilterError("and requires at least one child")


@dataclass(frozen=True)
class Or(_Predicate):
    children: tuple["FilterExpr", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 1:
            raise FilterError("or requires at least one child")


@dataclass(frozen=True)
class Not(_Predicate):
    child: "FilterExpr"


FilterExpr = Union[Cmp, InSet, PrefixIn, IsAbsent, And, Or, Not]


def _is_number(value) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


def _eval_leaf(expr, record: DocumentRecord) -> bool:
    value = expr.path.resolve(record)
    if isinstance(expr, IsAbsent):
        return value is None
    if value is None:
        return False
    if isinstance(expr, InSet):
        return isinstance(value, str) and value in expr.values
    if isinstance(expr, PrefixIn):
        return isinstance(value, str) and prefix_match(
            value, expr.keys, expr.length)
    op, literal = expr.op, expr.value
    if isinstance(literal, str):
        if not isinstance(value, str):
            return False
        return (value == literal) if op == "==" else (value != literal)
    if not _is_number(value):
        return False
    if op == "<":
        return value < literal
    if op == ">":
        return value > literal
    if op == "<=":
        return value <= literal
    if op == ">=":
        return value >= literal
    if op == "==":
        return value == literal
    return value != literal


@lru_cache(maxsize=4096)
def _leaf_label(expr: "FilterExpr") -> str:
    return to_text(expr)


def explain(expr: FilterExpr, record: DocumentRecord
            ) -> tuple[bool, str | None]:
    """Evaluate and, on rejection, name the first failing condition in
    evaluation order.

    The label is the textual form of the failing leaf; a failed ``or``
    reports its first branch's failing leaf, and a failed ``not``
    reports the negated subtree.
    """
    if isinstance(expr, And):
        for child in expr.children:
            verdict, leaf = explain(child, record)
            if not verdict:
                return False, leaf
        return True, None
    if isinstance(expr, Or):
        first_leaf = None
        for child in expr.children:
            verdict, leaf = explain(child, record)
            if verdict:
                return True, None
            if first_leaf is None:
                first_leaf = leaf
        return False, first_leaf
    if isinstance(expr, Not):
        if evaluate(expr.child, record):
            return False, _leaf_label(expr)
        return True, None
    verdict = _eval_leaf(expr, record)
    return verdict, None if verdict else _leaf_label(expr)


def evaluate(expr: FilterExpr, record: DocumentRecord) -> bool:
    """Pure, deterministic predicate evaluation."""
    if isinstance(expr, And):
        return all(evaluate(c, record) for c in expr.children)
    if isinstance(expr, Or):
        return any(evaluate(c, record) for c in expr.children)
    if isinstance(expr, Not):
        return not evaluate(expr.child, record)
    return _eval_leaf(expr, record)


@dataclass
class FilterStats:
    """Kept/total counts plus first-failing-leaf rejection attribution."""

    n_in: int = 0
    n_kept: int = 0
    rejections: Counter = field(default_factory=Counter)

    @property
    def n_rejected(self) -> int:
        return self.n_in - self.n_kept

    @property
    def kept_fraction(self) -> float:
        return self.n_kept / self.n_in if self.n_in else 0.0

    def merge(self, other: "FilterStats") -> None:
        self.n_in += other.n_in
        self.n_kept += other.n_kept
        self.rejections.update(other.rejections)


def run_filter(records: Iterable[DocumentRecord], expr: FilterExpr
               ) -> tuple[Iterator[DocumentRecord], FilterStats]:
    """Stream the records the filter keeps, in input order, counting
    rejections per failing condition; idempotent for a fixed expr."""
    stats = FilterStats()

    def gen() -> Iterator[DocumentRecord]:
        for record in records:
            stats.n_in += 1
            verdict, leaf = explain(expr, record)
            if verdict:
                stats.n_kept += 1
                yield record
            else:
                stats.rejections[leaf] += 1

    return gen(), stats


# Textual form -------------------------------------------------------------

def _quote(value: str) -> str:
    return json.dumps(value, ensure_ascii=False)


def _format_number(value) -> str:
    return repr(value)


def _set_text(values: frozenset[str]) -> str:
    return "{" + ", ".join(_quote(v) for v in sorted(values)) + "}"


def to_text(expr: FilterExpr) -> str:
    """Render an expression in the textual grammar; parse_filter of the
    result reproduces the tree."""
    if isinstance(expr, Cmp):
        literal = (_quote(expr.value) if isinstance(expr.value, str)
                   else _format_number(expr.value))
        return f"{expr.path.dotted} {expr.op} {literal}"
    if isinstance(expr, InSet):
        return f"{expr.path.dotted} in {_set_text(expr.values)}"
    if isinstance(expr, PrefixIn):
        suffix = f"({expr.length})" if expr.length is not None else ""
        return f"{expr.path.dotted} prefix_in{suffix} {_set_text(expr.keys)}"
    if isinstance(expr, IsAbsent):
        return f"{expr.path.dotted} is absent"
    if isinstance(expr, Not):
        if isinstance(expr.child, InSet):
            child = expr.child
            return f"{child.path.dotted} not in {_set_text(child.values)}"
        return f"not ({to_text(expr.child)})"
    joiner = " and " if isinstance(expr, And) else " or "
    rendered = []
    for child in expr.children:
        text = to_text(child)
        if isinstance(child, (And, Or)):
            text = f"({text})"
        rendered.append(text)
    return joiner.join(rendered)


# Parser -------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<preset>@[A-Za-z0-9_-]+)
  | (?P<number>-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<path>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)
  | (?P<string>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
  | (?P<op><=|>=|==|!=|<|>|=)
  | (?P<punct>[(){},])
""", re.VERBOSE)

_KEYWORDS = frozenset(("and", "or", "not", "in", "prefix_in", "is", "absent"))


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FilterError(
                f"cannot tokenize filter at position {pos}: {text[pos:pos+20]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        value = m.group()
        if kind == "path" and value in _KEYWORDS:
            kind = "keyword"
        tokens.append((kind, value))
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str]:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, kind: str, value: str | None = None) -> str:
        got_kind, got_value = self.next()
        if got_kind != kind or (value is not None and got_value != value):
            want = value if value is not None else kind
            raise FilterError(f"expected {want!r}, got {got_value!r}")
        return got_value

    def parse(self) -> FilterExpr:
        expr = self.parse_or()
        if self.peek()[0] != "end":
            raise FilterError(f"unexpected trailing input {self.peek()[1]!r}")
        return expr

    def parse_or(self) -> FilterExpr:
        children = [self.parse_and()]
        while self.peek() == ("keyword", "or"):
            self.next()
            children.append(self.parse_and())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def parse_and(self) -> FilterExpr:
        children = [self.parse_unary()]
        while self.peek() == ("keyword", "and"):
            self.next()
            children.append(self.parse_unary())
        return children[0] if len(children) == 1 else And(tuple(children))

    def parse_unary(self) -> FilterExpr:
        kind, value = self.peek()
        if (kind, value) == ("keyword", "not"):
            self.next()
            return Not(self.parse_unary())
        if (kind, value) == ("punct", "("):
            self.next()
            expr = self.parse_or()
            self.expect("punct", ")")
            return expr
        if kind == "preset":
            self.next()
            return preset(value[1:])
        return self.parse_leaf()

    def parse_leaf(self) -> FilterExpr:
        kind, value = self.next()
        if kind != "path":
            raise FilterError(f"expected a field path, got {value!r}")
        try:
            path = FieldPath(value)
        except FilterError:
            raise
        kind, value = self.next()
        if kind == "op":
            op = "==" if value == "=" else value
            return Cmp(path, op, self.parse_literal())
        if (kind, value) == ("keyword", "in"):
            return InSet(path, self.parse_string_set())
        if (kind, value) == ("keyword", "not"):
            self.expect("keyword", "in")
            return Not(InSet(path, self.parse_string_set()))
        if (kind, value) == ("keyword", "prefix_in"):
            length = None
            if self.peek() == ("punct", "("):
                self.next()
                number = self.expect("number")
                length = int(number)
                self.expect("punct", ")")
            return PrefixIn(path, self.parse_string_set(), length)
        if (kind, value) == ("keyword", "is"):
            self.expect("keyword", "absent")
            return IsAbsent(path)
        raise FilterError(f"expected an operator after {path.dotted!r}, "
                          f"got {value!r}")

    def parse_literal(self) -> float | int | str:
        kind, value = self.next()
        if kind == "number":
            return self.parse_number(value)
        if kind == "string":
            return self.parse_string(value)
        raise FilterError(f"expected a literal, got {value!r}")

    @staticmethod
    def parse_number(text: str) -> float | int:
        try:
            return int(text)
        except ValueError:
            return float(text)

    @staticmethod
    def parse_string(token: str) -> str:
        body = token[1:-1]
        return re.sub(r"\\(.)", r"\1", body)

    def parse_string_set(self) -> frozenset[str]:
        self.expect("punct", "{")
        values = []
        while True:
            kind, value = self.next()
            if kind != "string":
                raise FilterError(f"expected a quoted string, got {value!r}")
            values.append(self.parse_string(value))
            kind, value = self.next()
            if (kind, value) == ("punct", "}"):
                break
            if (kind, value) != ("punct", ","):
                raise FilterError(f"expected ',' or '}}', got {value!r}")
            if self.peek() == ("punct", "}"):
                self.next()
                break
        return frozenset(values)


def parse_filter(text: str) -> FilterExpr:
    """Parse the textual grammar into a predicate tree, validating
    field paths against the record schema."""
    return _Parser(_tokenize(text)).parse()


# Presets ------------------------------------------------------------------

DCLM_BASELINE_THRESH = 0.01811

_GOOD_REASONING = (
    "No Reasoning", "Basic Reasoning", "Intermediate Reasoning",
    "Advanced Reasoning", "Exceptional Reasoning",
)


def _path(dotted: str) -> FieldPath:
    return FieldPath(dotted)


def _in(dotted: str, *values: str) -> InSet:
    return InSet(_path(dotted), frozenset(values))


def _not_in(dotted: str, *values: str) -> Not:
    return Not(_in(dotted, *values))


def _prefix(dotted: str, *keys: str, length: int | None = None) -> PrefixIn:
    return PrefixIn(_path(dotted), frozenset(keys), length)


def _and(*children: FilterExpr) -> And:
    flat: list[FilterExpr] = []
    for child in children:
        flat.extend(child.children if isinstance(child, And) else (child,))
    return And(tuple(flat))


def _or(*children: FilterExpr) -> Or:
    return Or(tuple(children))


_DCLM_LEAF = Cmp(_path("quality_signals.rps_doc_ml_eli5_score"), ">",
                 DCLM_BASELINE_THRESH)


def _preset_top_math() -> FilterExpr:
    return _and(
        _prefix("fdc.primary", "51"),
        _in("doc_type_v1.primary",
            "Reference/Encyclopedic/Educational", "Code/Software",
            "Social/Forum", "Personal/Misc"),
        _in("doc_type_v2.primary",
            "Comment Section", "Documentation", "FAQ", "Knowledge Article",
            "Nonfiction Writing", "Personal Blog", "Q&A Forum",
            "Structured Data", "Tutorial"),
        _in("reasoning_depth.primary",
            "Basic Reasoning", "Intermediate Reasoning", "Advanced Reasoning",
            "Exceptional Reasoning"),
        _in("technical_correctness.primary",
            "Highly Correct", "Exceptionally Correct"),
    )


def _preset_math_w_fm() -> FilterExpr:
    return _and(
        _or(_prefix("fdc.primary", "51"), _prefix("fdc.secondary", "51")),
        Cmp(_path("finemath_score"), ">=", 3.25),
    )


def _preset_code() -> FilterExpr:
    return _and(
        _prefix("fdc.primary", "005.1", "005.3"),
        _in("doc_type_v1.primary",
            "Reference/Encyclopedic/Educational", "Social/Forum"),
        _in("doc_type_v2.primary",
            "Comment Section", "Documentation", "Knowledge Article",
            "Tutorial", "Personal Blog", "Q&A Forum"),
        _in("reasoning_depth.primary",
            "Intermediate Reasoning", "Advanced Reasoning",
            "Exceptional Reasoning"),
        _in("technical_correctness.primary", "Highly Correct"),
    )


def _preset_code_w_dclm() -> FilterExpr:
    return _and(
        _prefix("fdc.primary", "004", "005", "51"),
        _in("doc_type_v2.primary",
            "Personal Blog", "Knowledge Article", "Comment Section",
            "Documentation", "Tutorial", "Q&A Forum"),
        _in("reasoning_depth.primary",
            "Basic Reasoning", "Intermediate Reasoning", "Advanced Reasoning",
            "Exceptional Reasoning"),
        _DCLM_LEAF,
    )


_MEDICAL_SCIENCE_CODES = ("50", "51", "54", "57", "58", "59", "61")


def _preset_medical() -> FilterExpr:
    return _and(
        _or(
            _and(_prefix("fdc.primary", "61"),
                 _prefix("fdc.secondary", *_MEDICAL_SCIENCE_CODES)),
            _and(_prefix("fdc.secondary", "61"),
                 _prefix("fdc.primary", *_MEDICAL_SCIENCE_CODES)),
        ),
        _or(
            _in("doc_type_v1.primary",
                "Academic/Research", "Reference/Encyclopedic/Educational"),
            _in("doc_type_v2.primary",
                "Academic Writing", "Documentation", "Knowledge Article",
                "Q&A Forum"),
        ),
        _not_in("doc_type_v1.primary",
                "News/Editorial", "Code/Software", "Social/Forum",
                "Promotional/Advertisement", "Adult/Pornographic",
                "Personal/Misc", "Machine-Generated",
                "E-Commerce/Marketplace", "Images/Videos/Audio"),
        _not_in("doc_type_v2.primary",
                "About (Org.)", "About (Personal)", "Audio Transcript",
                "Comment Section", "Content Listing", "Creative Writing",
                "Legal Notices", "Listicle", "News (Org.)", "News Article",
                "Personal Blog", "Product Page", "Spam / Ads",
                "Structured Data", "Truncated", "Tutorial", "User Review"),
        _in("reasoning_depth.primary",
            "Basic Reasoning", "Intermediate Reasoning", "Advanced Reasoning",
            "Exceptional Reasoning"),
        _in("technical_correctness.primary",
            "Highly Correct", "Exceptionally Correct"),
    )


_STEM_SCIENCE_FDC = ("50", "51", "52", "53", "54", "55", "56", "57", "58",
                     "59")
_STEM_TECH_FDC = ("60", "61", "62", "66", "00")
_STEM_VALID_FDC = _STEM_SCIENCE_FDC + _STEM_TECH_FDC
_STEM_PROG_FDC = ("005.1", "005.4")


def _preset_stem() -> FilterExpr:
    code_branch = _and(
        _or(_prefix("fdc.primary", *_STEM_PROG_FDC, length=5),
            _prefix("fdc.secondary", *_STEM_PROG_FDC, length=5)),
        _in("doc_type_v1.primary",
            "Academic/Research", "Reference/Encyclopedic/Educational",
            "Code/Software", "Social/Forum"),
        _in("doc_type_v2.primary",
            "Academic Writing", "Comment Section", "Documentation",
            "Knowledge Article", "Personal Blog", "Q&A Forum", "Tutorial"),
    )
    medical_branch = _and(
        _or(_prefix("fdc.primary", "61"), _prefix("fdc.secondary", "61")),
        _in("doc_type_v1.primary",
            "Academic/Research", "Reference/Encyclopedic/Educational",
            "Code/Software", "Legal/Regulatory"),
        _in("doc_type_v2.primary",
            "Academic Writing", "Documentation", "FAQ", "Knowledge Article",
            "News Article", "Tutorial"),
    )
    engineering_branch = _and(
        _or(_prefix("fdc.primary", "62"), _prefix("fdc.secondary", "62")),
        _in("doc_type_v1.primary",
            "Academic/Research", "Reference/Encyclopedic/Educational",
            "Personal/Misc", "Legal/Regulatory"),
        _in("doc_type_v2.primary",
            "Academic Writing", "Audio Transcript", "Documentation", "FAQ",
            "Knowledge Article", "News Article", "Tutorial"),
    )
    default_branch = _and(
        _in("doc_type_v1.primary",
            "Academic/Research", "Reference/Encyclopedic/Educational"),
        _in("doc_type_v2.primary",
            "Academic Writing", "Knowledge Article", "News Article"),
    )
    return _and(
        _prefix("fdc.primary", *_STEM_VALID_FDC),
        _prefix("fdc.secondary", *_STEM_VALID_FDC),
        _in("reasoning_depth.primary", *_GOOD_REASONING),
        _or(code_branch, medical_branch, engineering_branch, default_branch),
    )


def _build_presets() -> dict[str, FilterExpr]:
    base = {
        "top-math": _preset_top_math(),
        "math-w-fm": _preset_math_w_fm(),
        "code": _preset_code(),
        "code-w-dclm": _preset_code_w_dclm(),
        "medical": _preset_medical(),
        "stem": _preset_stem(),
    }
    base["medical-w-dclm"] = _and(base["medical"], _DCLM_LEAF)
    base["stem-w-dclm"] = _and(base["stem"], _DCLM_LEAF)
    return base


_PRESETS = _build_presets()

PRESET_NAMES = ("top-math", "math-w-fm", "code", "code-w-dclm", "medical",
                "medical-w-dclm", "stem", "stem-w-dclm")


def preset(name: str) -> FilterExpr:
    """The named preset's predicate tree; unknown names raise with the
    full list."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise FilterError(
            f"unknown preset {name!r}; valid presets: "
            f"{', '.join(PRESET_NAMES)}") from None
