"""Filter DSL: paths, leaves, parser, renderer, presets, attribution."""

import itertools

import pytest

from taxonomy_forge.filters import (
    And,
    Cmp,
    DCLM_BASELINE_THRESH,
    FieldPath,
    FilterError,
    FilterStats,
    InSet,
    IsAbsent,
    Not,
    Or,
    PRESET_NAMES,
    PrefixIn,
    evaluate,
    explain,
    parse_filter,
    prefix_match,
    preset,
    run_filter,
    to_text,
)
from taxonomy_forge.records import CategoryAnnotation, DocumentRecord
from taxonomy_forge.signals import QualitySignals


def make_record(text="doc", url=None, fdc=None, fdc2=None, scores=None,
                signal_extras=None, **annotations):
    ann = {}
    if fdc is not None:
        ann["fdc"] = CategoryAnnotation(primary=fdc, secondary=fdc2)
    for cat, primary in annotations.items():
        ann[cat] = CategoryAnnotation(primary=primary)
    signals = None
    if signal_extras is not None:
        signals = QualitySignals(word_count=100, extras=signal_extras)
    return DocumentRecord(text=text, url=url, annotations=ann,
                          signals=signals, scores=scores or {})


class TestPrefixMatch:
    def test_reference_cases(self):
        assert prefix_match("512.3", {"51"})
        assert prefix_match("005.1", {"005.1", "005.3"})
        assert not prefix_match("005.2", {"005.1", "005.3"})
        assert not prefix_match("51", {"512"})
        assert not prefix_match(None, {"51"})

    def test_explicit_length_truncates_code(self):
        # Level-limited matching: the code is cut before comparison, so
        # "005.13" at length 5 is exactly "005.1".
        assert prefix_match("005.13", {"005.1"}, length=5)
        assert not prefix_match("005.13", {"005.13"}, length=5)
        assert prefix_match("005.1", {"005.1"}, length=5)


class TestFieldPath:
    def test_builtin_and_aliases(self):
        assert FieldPath("url").dotted == "url"
        assert FieldPath("eai_taxonomy.fdc.primary").dotted == "fdc.primary"
        assert FieldPath("dds.primary.code").dotted == "fdc.primary"
        assert FieldPath("fdc_level_2.primary").dotted == "fdc_level_2.primary"

    def test_bad_paths_rejected(self):
        for bad in ("nope", "fdc", "fdc.tertiary", "quality_signals",
                    "quality_signals.a.b", "scores.a.b", "fdc..primary"):
            with pytest.raises(FilterError):
                FieldPath(bad)

    def test_resolution_order_for_bare_scores(self):
        rec = make_record(scores={"custom_score": 0.9},
                          signal_extras={"custom_score": 0.1})
        assert FieldPath("custom_score").resolve(rec) == 0.9
        assert FieldPath("quality_signals.custom_score").resolve(rec) == 0.1
        rec = make_record(signal_extras={"finemath_score": 3.5})
        assert FieldPath("finemath_score").resolve(rec) == 3.5
        rec = DocumentRecord(text="t", extra={"finemath_score": 2.0})
        assert FieldPath("finemath_score").resolve(rec) == 2.0
        assert FieldPath("finemath_score").resolve(make_record()) is None

    def test_annotation_resolution(self):
        rec = make_record(fdc="512.3", fdc2="005.1")
        assert FieldPath("fdc.primary").resolve(rec) == "512.3"
        assert FieldPath("fdc.secondary").resolve(rec) == "005.1"
        assert FieldPath("fdc_level_1.primary").resolve(rec) == "5"
        assert FieldPath("fdc_level_2.secondary").resolve(rec) == "00"
        assert FieldPath("doc_type_v1.primary").resolve(rec) is None


class TestLeafSemantics:
    def test_cmp_numeric(self):
        rec = make_record(scores={"ml_math_score": 0.5})
        assert evaluate(parse_filter("ml_math_score > 0.3"), rec)
        assert not evaluate(parse_filter("ml_math_score > 0.5"), rec)
        assert evaluate(parse_filter("ml_math_score >= 0.5"), rec)
        assert evaluate(parse_filter("ml_math_score != 0.4"), rec)

    def test_absent_fails_everything_but_absence(self):
        rec = make_record()
        assert not evaluate(parse_filter("ml_math_score > 0.0"), rec)
        assert not evaluate(parse_filter('fdc.primary in {"51"}'), rec)
        assert not evaluate(parse_filter('fdc.primary prefix_in {"51"}'), rec)
        assert evaluate(parse_filter("ml_math_score is absent"), rec)
        assert evaluate(parse_filter("url is absent"), rec)

    def test_not_in_passes_on_absent(self):
        # Blacklists exclude known-bad labels; an unlabeled record is
        # not known-bad.
        rec = make_record()
        assert evaluate(parse_filter('doc_type_v1.primary not in {"Spam"}'),
                        rec)
        rec = make_record(doc_type_v1="Spam")
        assert not evaluate(
            parse_filter('doc_type_v1.primary not in {"Spam"}'), rec)

    def test_string_equality_only(self):
        with pytest.raises(FilterError):
            parse_filter('url > "a"')
        rec = make_record(url="https://x.com")
        assert evaluate(parse_filter('url == "https://x.com"'), rec)
        assert evaluate(parse_filter('url != "other"'), rec)

    def test_type_mismatch_fails(self):
        rec = make_record(url="not a number")
        assert not evaluate(parse_filter("url == 5"), rec)
        rec = make_record(scores={"ml_math_score": 0.5})
        assert not evaluate(parse_filter('ml_math_score == "0.5"'), rec)

    def test_node_validation(self):
        with pytest.raises(FilterError):
            InSet(FieldPath("fdc.primary"), frozenset())
        with pytest.raises(FilterError):
            PrefixIn(FieldPath("fdc.primary"), frozenset({""}))
        with pytest.raises(FilterError):
            PrefixIn(FieldPath("fdc.primary"), frozenset({"51"}), length=0)
        with pytest.raises(FilterError):
            Cmp(FieldPath("url"), "~", 1)
        with pytest.raises(FilterError):
            And(())


class TestParserAndRenderer:
    ROUND_TRIPS = [
        "ml_math_score > 0.3",
        'fdc.primary prefix_in {"51"}',
        'fdc.primary prefix_in(5) {"005.1", "005.4"}',
        'doc_type_v1.primary in {"A", "B"}',
        'doc_type_v1.primary not in {"A"}',
        "url is absent",
        'fdc.primary prefix_in {"51"} and ml_math_score > 0.3',
        '(a_score > 1 and b_score > 2) or not (url is absent)',
        "quality_signals.rps_doc_ml_eli5_score > 0.01811",
    ]

    @pytest.mark.parametrize("text", ROUND_TRIPS)
    def test_round_trip(self, text):
        expr = parse_filter(text)
        rendered = to_text(expr)
        assert parse_filter(rendered) == expr

    def test_precedence(self):
        expr = parse_filter("a_score > 1 or b_score > 2 and c_score > 3")
        assert isinstance(expr, Or)
        assert isinstance(expr.children[1], And)
        expr = parse_filter("not a_score > 1 and b_score > 2")
        assert isinstance(expr, And)
        assert isinstance(expr.children[0], Not)

    def test_parens_override(self):
        expr = parse_filter("(a_score > 1 or b_score > 2) and c_score > 3")
        assert isinstance(expr, And)
        assert isinstance(expr.children[0], Or)

    def test_preset_reference(self):
        assert parse_filter("@code") == preset("code")
        combined = parse_filter("@code and ml_math_score > 0.1")
        assert isinstance(combined, And)

    def test_string_escapes_and_quotes(self):
        expr = parse_filter('doc_type_v2.primary in {"Spam / Ads", \'Q&A Forum\'}')
        assert expr.values == {"Spam / Ads", "Q&A Forum"}
        expr = parse_filter('url == "quote \\" inside"')
        assert expr.value == 'quote " inside'

    def test_trailing_comma_tolerated(self):
        expr = parse_filter('doc_type_v1.primary in {"A", "B",}')
        assert expr.values == {"A", "B"}

    def test_equals_alias(self):
        assert parse_filter("a_score = 1") == parse_filter("a_score == 1")

    def test_parse_errors(self):
        for bad in ("", "and", "a_score >", "a_score > > 1",
                    "doc_type_v1.primary in {}", "url is", "@nope",
                    "a_score > 1 garbage", "fdc.primary prefix_in(0) {\"5\"}"):
            with pytest.raises(FilterError):
                parse_filter(bad)

    def test_de_morgan_equivalence(self):
        # not (A and B) must behave as (not A) or (not B) on records.
        lhs = parse_filter('not (fdc.primary prefix_in {"51"} '
                           'and ml_math_score > 0.3)')
        rhs = parse_filter('not fdc.primary prefix_in {"51"} '
                           'or not ml_math_score > 0.3')
        fixtures = [
            make_record(fdc="512", scores={"ml_math_score": 0.5}),
            make_record(fdc="512", scores={"ml_math_score": 0.1}),
            make_record(fdc="600", scores={"ml_math_score": 0.5}),
            make_record(),
        ]
        for rec in fixtures:
            assert evaluate(lhs, rec) == evaluate(rhs, rec)


class TestExplainAndStats:
    def test_first_failing_leaf_in_order(self):
        expr = parse_filter('fdc.primary prefix_in {"51"} '
                            'and ml_math_score > 0.3')
        ok, leaf = explain(expr, make_record(fdc="60",
                                             scores={"ml_math_score": 0.1}))
        assert not ok
        assert leaf == 'fdc.primary prefix_in {"51"}'
        ok, leaf = explain(expr, make_record(fdc="512",
                                             scores={"ml_math_score": 0.1}))
        assert not ok
        assert leaf == "ml_math_score > 0.3"
        ok, leaf = explain(expr, make_record(fdc="512",
                                             scores={"ml_math_score": 0.9}))
        assert ok and leaf is None

    def test_failed_or_reports_first_branch(self):
        expr = parse_filter("a_score > 1 or b_score > 2")
        ok, leaf = explain(expr, make_record())
        assert not ok and leaf == "a_score > 1"

    def test_failed_not_reports_subtree(self):
        expr = parse_filter('doc_type_v1.primary not in {"Spam"}')
        ok, leaf = explain(expr, make_record(doc_type_v1="Spam"))
        assert not ok
        assert leaf == 'doc_type_v1.primary not in {"Spam"}'

    def test_run_filter_stats(self):
        expr = parse_filter("ml_math_score > 0.3")
        records = [make_record(scores={"ml_math_score": s})
                   for s in (0.5, 0.1, 0.9, 0.2)]
        stream, stats = run_filter(records, expr)
        kept = list(stream)
        assert len(kept) == 2
        assert stats.n_in == 4 and stats.n_kept == 2
        assert stats.n_rejected == 2
        assert stats.kept_fraction == 0.5
        assert stats.rejections == {"ml_math_score > 0.3": 2}

    def test_stats_merge(self):
        a = FilterStats(n_in=4, n_kept=2)
        a.rejections["x"] = 2
        b = FilterStats(n_in=6, n_kept=5)
        b.rejections["x"] = 1
        a.merge(b)
        assert a.n_in == 10 and a.n_kept == 7
        assert a.rejections == {"x": 3}


def math_record(**overrides):
    base = dict(
        fdc="512.3",
        doc_type_v1="Reference/Encyclopedic/Educational",
        doc_type_v2="Knowledge Article",
        reasoning_depth="Intermediate Reasoning",
        technical_correctness="Highly Correct",
    )
    base.update(overrides)
    fdc = base.pop("fdc")
    fdc2 = base.pop("fdc2", None)
    scores = base.pop("scores", None)
    extras = base.pop("signal_extras", None)
    return make_record(fdc=fdc, fdc2=fdc2, scores=scores,
                       signal_extras=extras, **base)


class TestPresets:
    def test_all_presets_parse_and_round_trip(self):
        assert PRESET_NAMES == ("top-math", "math-w-fm", "code",
                                "code-w-dclm", "medical", "medical-w-dclm",
                                "stem", "stem-w-dclm")
        for name in PRESET_NAMES:
            expr = preset(name)
            assert parse_filter(to_text(expr)) == expr

    def test_unknown_preset_lists_names(self):
        with pytest.raises(FilterError, match="top-math"):
            preset("nope")

    def test_top_math(self):
        expr = preset("top-math")
        assert evaluate(expr, math_record())
        assert not evaluate(expr, math_record(fdc="600"))
        assert not evaluate(expr, math_record(
            technical_correctness="Mostly Correct"))
        assert not evaluate(expr, math_record(
            reasoning_depth="No Reasoning"))

    def test_math_w_fm(self):
        expr = preset("math-w-fm")
        good = make_record(fdc="512", signal_extras={"finemath_score": 3.25})
        assert evaluate(expr, good)
        assert not evaluate(expr, make_record(
            fdc="512", signal_extras={"finemath_score": 3.0}))
        # Secondary rescue: primary out of domain, secondary in.
        assert evaluate(expr, make_record(
            fdc="600", fdc2="512", signal_extras={"finemath_score": 4.0}))

    def test_code(self):
        expr = preset("code")
        good = math_record(
            fdc="005.1",
            doc_type_v2="Documentation",
            reasoning_depth="Advanced Reasoning")
        assert evaluate(expr, good)
        assert not evaluate(expr, math_record(
            fdc="005.2", doc_type_v2="Documentation",
            reasoning_depth="Advanced Reasoning"))
        # Basic reasoning is below this preset's floor.
        assert not evaluate(expr, math_record(
            fdc="005.1", doc_type_v2="Documentation",
            reasoning_depth="Basic Reasoning"))

    def test_code_w_dclm_threshold(self):
        expr = preset("code-w-dclm")
        def rec(eli5):
            return math_record(
                fdc="005.7", doc_type_v2="Tutorial",
                signal_extras={"rps_doc_ml_eli5_score": eli5})
        assert evaluate(expr, rec(0.02))
        assert not evaluate(expr, rec(0.01811))
        assert not evaluate(expr, rec(0.018))
        assert DCLM_BASELINE_THRESH == 0.01811

    def test_medical_pairing(self):
        expr = preset("medical")
        good = math_record(
            fdc="610", fdc2="570",
            doc_type_v1="Academic/Research",
            doc_type_v2="Academic Writing")
        assert evaluate(expr, good)
        # Swapped positions also pair.
        assert evaluate(expr, math_record(
            fdc="570", fdc2="610",
            doc_type_v1="Academic/Research",
            doc_type_v2="Academic Writing"))
        # Medical alone, no science secondary: out.
        assert not evaluate(expr, math_record(
            fdc="610",
            doc_type_v1="Academic/Research",
            doc_type_v2="Academic Writing"))
        # Blacklisted v2 type: out even when whitelisted v1 passes.
        assert not evaluate(expr, math_record(
            fdc="610", fdc2="570",
            doc_type_v1="Academic/Research",
            doc_type_v2="Personal Blog"))

    def test_stem_branches(self):
        expr = preset("stem")
        code = math_record(
            fdc="005.1", fdc2="005.4",
            doc_type_v1="Code/Software", doc_type_v2="Q&A Forum",
            reasoning_depth="No Reasoning")
        assert evaluate(expr, code)
        medical = math_record(
            fdc="610", fdc2="570",
            doc_type_v1="Legal/Regulatory", doc_type_v2="News Article")
        assert evaluate(expr, medical)
        engineering = math_record(
            fdc="620", fdc2="530",
            doc_type_v1="Personal/Misc", doc_type_v2="Audio Transcript")
        assert evaluate(expr, engineering)
        default = math_record(
            fdc="530", fdc2="510",
            doc_type_v1="Academic/Research", doc_type_v2="News Article")
        assert evaluate(expr, default)
        # Outside the valid FDC ranges entirely.
        assert not evaluate(expr, math_record(
            fdc="300", fdc2="510",
            doc_type_v1="Academic/Research", doc_type_v2="News Article"))
        # v2 type allowed only on the code branch, with a non-code FDC.
        assert not evaluate(expr, math_record(
            fdc="530", fdc2="510",
            doc_type_v1="Academic/Research", doc_type_v2="Q&A Forum"))

    def test_dclm_variants_add_one_leaf(self):
        for base_name in ("medical", "stem"):
            base = preset(base_name)
            augmented = preset(f"{base_name}-w-dclm")
            assert isinstance(augmented, And)
            assert augmented.children[:-1] == base.children
            assert augmented.children[-1] == parse_filter(
                "quality_signals.rps_doc_ml_eli5_score > 0.01811")

    def test_presets_are_pure_against_mutation_grid(self):
        # Flipping any single gating field of a passing record must
        # change exactly that preset's verdict as designed.
        expr = preset("top-math")
        rec = math_record()
        assert evaluate(expr, rec)
        for field, bad in [
            ("fdc", "800"),
            ("doc_type_v1", "Machine-Generated"),
            ("doc_type_v2", "Spam / Ads"),
            ("reasoning_depth", "No Reasoning"),
            ("technical_correctness", "Partially Correct"),
        ]:
            assert not evaluate(expr, math_record(**{field: bad}))
