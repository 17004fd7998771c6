"""Record model, JSONL round-trips, chunking, and label access."""

import io
import json
import random

import pytest
import xxhash

from taxonomy_forge.records import (
    CategoryAnnotation,
    DocumentRecord,
    RecordError,
    chunk_text,
    doc_id,
    label_set,
    parse_record,
    primary_label,
    read_records,
    record_rng,
    serialize_record,
    write_records,
)


class TestDocId:
    def test_known_xxh3_vector(self):
        # xxh3-64 of the empty input, from the reference test vectors.
        assert doc_id("") == 0x2D06800538D394C2

    def test_str_and_bytes_agree(self):
        assert doc_id("hello") == doc_id(b"hello")
        assert doc_id("café") == doc_id("café".encode("utf-8"))
        assert doc_id("hello") == xxhash.xxh3_64_intdigest(b"hello")

    def test_range_and_stability(self):
        for text in ("", "a", "x" * 1000, "ünicode"):
            i = doc_id(text)
            assert 0 <= i < 1 << 64
            assert doc_id(text) == i


class TestDocumentRecord:
    def test_id_defaults_to_content_hash(self):
        rec = DocumentRecord(text="hello")
        assert rec.id == doc_id("hello")

    def test_explicit_id_wins(self):
        assert DocumentRecord(text="hello", id=7).id == 7

    def test_id_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            DocumentRecord(text="x", id=-1)
        with pytest.raises(ValueError):
            DocumentRecord(text="x", id=1 << 64)

    def test_unknown_annotation_category_rejected(self):
        with pytest.raises(ValueError, match="unknown annotation category"):
            DocumentRecord(text="x", annotations={
                "mystery": CategoryAnnotation(primary="1")})

    def test_annotation_secondary_must_differ(self):
        with pytest.raises(ValueError):
            CategoryAnnotation(primary="1", secondary="1")
        ann = CategoryAnnotation(primary="1", secondary="2")
        assert (ann.primary, ann.secondary) == ("1", "2")


class TestParseSerialize:
    def test_round_trip_full_record(self):
        line = json.dumps({
            "id": 42,
            "text": "some document",
            "url": "https://example.com/a",
            "eai_taxonomy": {
                "fdc": {"primary": {"code": "005.1"},
                        "secondary": {"code": "512"},
                        "label": "CS"},
                "reasoning_depth": "3",
            },
            "quality_signals": {"word_count": 2, "frac_unique_words": 1.0},
            "scores": {"ml_math_score": 0.25},
            "custom_field": {"nested": [1, 2]},
        })
        rec = parse_record(line)
        assert rec.id == 42
        assert rec.url == "https://example.com/a"
        assert rec.annotations["fdc"].primary == "005.1"
        assert rec.annotations["fdc"].secondary == "512"
        assert rec.annotations["fdc"].extra == {"label": "CS"}
        assert rec.annotations["reasoning_depth"].primary == "3"
        assert rec.signals.word_count == 2
        assert rec.scores == {"ml_math_score": 0.25}
        assert rec.extra == {"custom_field": {"nested": [1, 2]}}

        again = parse_record(serialize_record(rec))
        assert again == rec

    def test_serialization_is_canonical(self):
        rec = parse_record('{"text": "t", "url": "u", "id": 3}')
        line = serialize_record(rec)
        assert line == serialize_record(parse_record(line))
        assert json.loads(line) == {"id": 3, "text": "t", "url": "u"}

    def test_unknown_fields_pass_through(self):
        rec = parse_record('{"text": "t", "zeta": 1, "alpha": 2}')
        out = json.loads(serialize_record(rec))
        assert out["zeta"] == 1 and out["alpha"] == 2

    def test_missing_text_raises(self):
        with pytest.raises(RecordError, match="text"):
            parse_record('{"id": 1}')

    def test_invalid_json_carries_line_number(self):
        with pytest.raises(RecordError, match="line 17"):
            parse_record("{oops", line_number=17)

    def test_bad_annotation_shape(self):
        with pytest.raises(RecordError):
            parse_record('{"text": "t", "eai_taxonomy": {"fdc": 5}}')
        with pytest.raises(RecordError):
            parse_record('{"text": "t", "eai_taxonomy": {"fdc": {"label": "x"}}}')

    def test_non_numeric_score_rejected(self):
        with pytest.raises(RecordError):
            parse_record('{"text": "t", "scores": {"ml_math_score": "high"}}')
        with pytest.raises(RecordError):
            parse_record('{"text": "t", "scores": {"ml_math_score": true}}')


class TestStreams:
    def test_read_skips_blank_lines_and_numbers_errors(self):
        stream = io.StringIO('{"text": "a"}\n\n   \n{"text": "b"}\n')
        texts = [r.text for r in read_records(stream)]
        assert texts == ["a", "b"]

        stream = io.StringIO('{"text": "a"}\n\nnot json\n')
        with pytest.raises(RecordError, match="line 3"):
            list(read_records(stream))

    def test_write_then_read(self):
        recs = [DocumentRecord(text=f"doc {i}") for i in range(3)]
        buf = io.StringIO()
        assert write_records(recs, buf) == 3
        buf.seek(0)
        assert list(read_records(buf)) == recs


class TestChunkText:
    def test_short_text_unchanged(self):
        rng = random.Random(0)
        assert chunk_text("short", 100, rng) == "short"
        text = "x" * 100
        assert chunk_text(text, 100, rng) == text

    def test_minimum_budget_enforced(self):
        with pytest.raises(ValueError):
            chunk_text("x" * 50, 8, random.Random(0))

    def test_reference_budget_length(self):
        text = "".join(chr(ord("a") + i % 26) for i in range(100_000))
        out = chunk_text(text, 30_000, random.Random(1))
        assert len(out) == 30_029

    @pytest.mark.parametrize("max_chars", [9, 10, 11, 13, 30, 31, 60])
    def test_structure_over_many_lengths(self, max_chars):
        cs = max_chars // 3
        for length in range(max_chars + 1, 4 * max_chars + 2, 7):
            text = "".join(chr(33 + (i * 7919) % 90) for i in range(length))
            out = chunk_text(text, max_chars, random.Random(length))
            head, rest = out.split("\n[middle]\n", 1)
            middle, tail = rest.split("\n[end]\n", 1)
            assert head == "[beginning]\n" + text[:cs]
            assert tail == text[-cs:]
            assert len(middle) == 2 * (cs // 2)
            assert len(out) == 29 + 2 * cs + 2 * (cs // 2)
            # The middle excerpt stays clear of both fixed excerpts.
            pos = text.find(middle, cs)
            assert pos >= cs
            assert pos + len(middle) <= len(text) - cs

    def test_deterministic_under_same_rng_state(self):
        text = "y" * 500
        a = chunk_text(text, 60, record_rng(5, 123))
        b = chunk_text(text, 60, record_rng(5, 123))
        assert a == b


class TestRecordRng:
    def test_same_key_same_stream(self):
        a = record_rng(1, 99)
        b = record_rng(1, 99)
        assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]

    def test_distinct_keys_distinct_streams(self):
        streams = {
            tuple(record_rng(seed, rid).random() for _ in range(3))
            for seed in (0, 1) for rid in (7, 8)
        }
        assert len(streams) == 4


class TestLabels:
    def _record(self):
        return DocumentRecord(text="t", annotations={
            "fdc": CategoryAnnotation(primary="512.3", secondary="005.1"),
            "reasoning_depth": CategoryAnnotation(primary=" 3 "),
        })

    def test_primary_label_direct_and_derived(self):
        rec = self._record()
        assert primary_label(rec, "reasoning_depth") == "3"
        assert primary_label(rec, "fdc_level_1") == "5"
        assert primary_label(rec, "fdc_level_2") == "51"
        assert primary_label(rec, "fdc_level_3") == "512"
        assert primary_label(rec, "doc_type_v1") is None

    def test_stored_level_beats_derived(self):
        rec = DocumentRecord(text="t", annotations={
            "fdc": CategoryAnnotation(primary="512.3"),
            "fdc_level_1": CategoryAnnotation(primary="9"),
        })
        assert primary_label(rec, "fdc_level_1") == "9"

    def test_label_set_truncates_both_positions(self):
        rec = self._record()
        assert label_set(rec, "fdc_level_3") == {"512", "005"}
        assert label_set(rec, "fdc_level_1") == {"5", "0"}
        assert label_set(rec, "reasoning_depth") == {"3"}
        assert label_set(rec, "doc_type_v1") == frozenset()

    def test_label_set_collapses_on_truncation(self):
        rec = DocumentRecord(text="t", annotations={
            "fdc": CategoryAnnotation(primary="512.3", secondary="519")})
        assert label_set(rec, "fdc_level_2") == {"51"}
