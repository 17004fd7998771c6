"""
The full pipeline on the command line
=====================================

Curation runs as four streaming stages over JSON-lines record files:

    taxonomy-forge dedup    --input raw.jsonl      --output unique.jsonl
    taxonomy-forge signals  --input unique.jsonl   --output signalled.jsonl
    taxonomy-forge filter   --input signalled.jsonl --output kept.jsonl \\
                            --preset top-math
    taxonomy-forge decontam --input kept.jsonl     --output clean.jsonl \\
                            --config pipeline.yaml

Every stage reads and writes the same record format, emits a one-line
JSON summary on stderr, and is deterministic: same inputs and config,
same bytes out, regardless of worker count. This script builds a small
corpus with planted problems, runs the stages in-process through the
same entry point the console script uses, and watches the problems
disappear.
"""

import json
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from io import StringIO
from pathlib import Path

from taxonomy_forge.cli import main

MATH_TAXONOMY = {
    "fdc": {"primary": {"code": "512.3"}},
    "doc_type_v1": {"primary": {"code": "Reference/Encyclopedic/Educational"}},
    "doc_type_v2": {"primary": {"code": "Knowledge Article"}},
    "reasoning_depth": {"primary": {"code": "Intermediate Reasoning"}},
    "technical_correctness": {"primary": {"code": "Highly Correct"}},
}


def build_corpus(n=600):
    """Records with planted duplicates, a benchmark leak, and off-topic
    documents, on top of clean mathematical prose."""
    rows = []
    for i in range(n):
        words = []
        for j in range(70):
            words.append(f"doc{i}w{j}")
            if j % 3 == 2:
                words.append("the")
        text = " ".join(words)
        if i % 40 == 1:                       # byte-identical duplicate
            text = rows[-1]["text"]
        elif i % 40 == 2:                     # near duplicate
            text = rows[-2]["text"].rsplit(" ", 2)[0] + " slight change"
        elif i % 100 == 50:                   # benchmark excerpt leak
            mid = text.split()
            leak = " ".join(f"bench{i}tok{t}" for t in range(13))
            text = " ".join(mid[:40]) + " " + leak + " " + " ".join(mid[40:])
        taxonomy = MATH_TAXONOMY if i % 2 == 0 else {
            "fdc": {"primary": {"code": "810"}},
            "doc_type_v1": {"primary": {"code": "Creative/Fiction"}},
        }
        host = "mathnotes.example.edu" if i % 2 == 0 else "stories.example.net"
        rows.append({
            "text": text,
            "url": f"https://{host}/page/{i}",
            "eai_taxonomy": taxonomy,
            "quality_signals": {"ml_english_score": 0.9},
        })
    return rows


def run(argv):
    """Invoke one CLI stage, returning its stderr summary line."""
    captured = StringIO()
    with redirect_stderr(captured):
        code = main(argv)
    assert code == 0, captured.getvalue()
    summary = json.loads(captured.getvalue().strip().splitlines()[-1])
    print(f"  $ taxonomy-forge {' '.join(argv)}")
    print(f"    {json.dumps(summary, sort_keys=True)}")
    return summary


with tempfile.TemporaryDirectory() as tmp:
    base = Path(tmp)
    raw = base / "raw.jsonl"
    raw.write_text("".join(json.dumps(r) + "\n" for r in build_corpus()),
                   encoding="utf-8")

    # The benchmark the corpus must not overlap: 13-token questions,
    # six of which were planted into corpus documents above.
    bench = base / "benchmark.jsonl"
    bench.write_text("".join(
        json.dumps({"text": " ".join(f"bench{i}tok{t}" for t in range(13))})
        + "\n" for i in range(50, 600, 100)), encoding="utf-8")

    config = base / "pipeline.yaml"
    config.write_text(
        "decontam:\n"
        f"  build_from: {bench}\n"
        f"  bloom: {base / 'bench.bloom'}\n"
        "  width: 13\n"
        "  target_fp: 1.0e-6\n", encoding="utf-8")

    print("stage 1: collapse exact and near duplicates")
    run(["dedup", "--input", str(raw),
         "--output", str(base / "unique.jsonl")])

    print("\nstage 2: compute quality signals, drop rule violations")
    run(["signals", "--input", str(base / "unique.jsonl"),
         "--output", str(base / "signalled.jsonl"), "--jobs", "2"])

    print("\nstage 3: keep the high-quality mathematics slice")
    run(["filter", "--input", str(base / "signalled.jsonl"),
         "--output", str(base / "kept.jsonl"), "--preset", "top-math"])

    print("\nstage 4: remove benchmark overlap")
    run(["decontam", "--input", str(base / "kept.jsonl"),
         "--output", str(base / "clean.jsonl"), "--config", str(config)])

    final = (base / "clean.jsonl").read_text(encoding="utf-8").splitlines()
    print(f"\nfinal corpus: {len(final)} records")
    sample = json.loads(final[0])
    print("sample record keys:", sorted(sample))
    print("sample signals:",
          {k: sample["quality_signals"][k]
           for k in ("word_count", "frac_unique_words", "ml_english_score")})

    # The metrics group audits a filter before committing to it:
    # against a trusted-domain URL list, the preset should keep the
    # trusted pages (recall) while discarding most of the stream.
    gold = base / "trusted.txt"
    gold.write_text("https://mathnotes.example.edu/\n", encoding="utf-8")
    print("\naudit: trusted-domain recall of the preset")
    out = StringIO()
    with redirect_stderr(StringIO()), redirect_stdout(out):
        assert main(["metrics", "recall",
                     "--input", str(base / "signalled.jsonl"),
                     "--preset", "top-math", "--gold", str(gold)]) == 0
    report = json.loads(out.getvalue())
    print(f"  recall={report['recall']:.3f} kept={report['kept']:.3f} "
          f"(gold docs: {report['n_gold']})")

    # Determinism: run the whole pipeline again into fresh files and
    # compare bytes.
    first_pass = (base / "clean.jsonl").read_bytes()
    for argv in (
        ["dedup", "--input", str(raw), "--output", str(base / "u2.jsonl")],
        ["signals", "--input", str(base / "u2.jsonl"),
         "--output", str(base / "s2.jsonl"), "--jobs", "8"],
        ["filter", "--input", str(base / "s2.jsonl"),
         "--output", str(base / "k2.jsonl"), "--preset", "top-math"],
        ["decontam", "--input", str(base / "k2.jsonl"),
         "--output", str(base / "c2.jsonl"), "--config", str(config)],
    ):
        with redirect_stderr(StringIO()):
            assert main(argv) == 0
    second_pass = (base / "c2.jsonl").read_bytes()
    print("\nrepeat run with 8 workers is byte-identical:",
          first_pass == second_pass)
