"""
Taxonomy filters: a small predicate language over annotated records
===================================================================

Curation recipes are predicates over a record's labels, signals, and
classifier scores. The textual grammar keeps recipes diffable and
config-friendly; parsing yields an expression tree that evaluates
deterministically, renders back to canonical text, and explains its
rejections by naming the first failing condition.
"""

from taxonomy_forge.filters import (PRESET_NAMES, evaluate, explain,
                                    parse_filter, preset, run_filter,
                                    to_text)
from taxonomy_forge.records import CategoryAnnotation, DocumentRecord
from taxonomy_forge.signals import QualitySignals

# ---------------------------------------------------------------
# The grammar: comparisons, set membership, code-prefix membership,
# absence checks, and/or/not with the usual precedence. Field paths
# name annotations (category.primary), signals, and scores.
# ---------------------------------------------------------------

text = ('fdc.primary prefix_in {"51"} '
        'and reasoning_depth.primary not in {"Abstain"} '
        'and (ml_math_score > 0.3 or quality_signals.word_count >= 500)')
expr = parse_filter(text)
print("canonical form:")
print(" ", to_text(expr))
print("round trip stable:", parse_filter(to_text(expr)) == expr)

# ---------------------------------------------------------------
# Evaluation is pure. explain() additionally names the first failing
# leaf, which is what rejection statistics count.
# ---------------------------------------------------------------


def make(fdc, depth, math=None, words=600):
    return DocumentRecord(
        text=f"body {fdc} {depth} {math} {words}",
        annotations={
            "fdc": CategoryAnnotation(primary=fdc),
            "reasoning_depth": CategoryAnnotation(primary=depth),
        },
        signals=QualitySignals(word_count=words),
        scores={} if math is None else {"ml_math_score": math})


algebra = make("512.3", "Intermediate Reasoning", math=0.7)
poetry = make("811", "Basic Reasoning", math=0.0)
thin = make("516", "Abstain")

for label, rec in (("algebra", algebra), ("poetry", poetry), ("thin", thin)):
    verdict, leaf = explain(expr, rec)
    print(f"  {label:8} evaluate={evaluate(expr, rec)!s:5} "
          f"reject_on={leaf or '-'}")

# ---------------------------------------------------------------
# Code prefixes match hierarchically: "51" admits 512.3 but a longer
# prefix pins a subfield.
# ---------------------------------------------------------------

narrow = parse_filter('fdc.primary prefix_in {"512"}')
print("\n512.3 under prefix 512:", evaluate(narrow, algebra))
print("516   under prefix 512:", evaluate(narrow, thin))

# ---------------------------------------------------------------
# run_filter streams the keepers and tallies rejections by leaf.
# ---------------------------------------------------------------

corpus = [algebra, poetry, thin,
          make("514", "Advanced Reasoning", math=0.9),
          make("530", "Basic Reasoning", math=0.1, words=120)]
kept, stats = run_filter(corpus, expr)
kept = list(kept)
print(f"\nkept {stats.n_kept} of {stats.n_in} "
      f"({stats.kept_fraction:.0%}); rejections by condition:")
for leaf, count in stats.rejections.most_common():
    print(f"  {count} x {leaf}")

# ---------------------------------------------------------------
# Domain presets are prebuilt trees in the same language, so they
# compose with ad-hoc conditions and render to text like anything
# else. The *-w-dclm variants add an external classifier floor.
# ---------------------------------------------------------------

print("\navailable presets:", ", ".join(PRESET_NAMES))
top_math = preset("top-math")
print("\ntop-math, first 160 chars of canonical text:")
print(" ", to_text(top_math)[:160], "...")

# The preset checks five categories, so a record needs the full
# annotation complement to pass.
textbook = DocumentRecord(
    text="a full worked treatment of eigenvalue decompositions",
    annotations={
        "fdc": CategoryAnnotation(primary="512.3"),
        "doc_type_v1": CategoryAnnotation(
            primary="Reference/Encyclopedic/Educational"),
        "doc_type_v2": CategoryAnnotation(primary="Knowledge Article"),
        "reasoning_depth": CategoryAnnotation(primary="Intermediate Reasoning"),
        "technical_correctness": CategoryAnnotation(primary="Highly Correct"),
    },
    scores={"ml_math_score": 0.95})
corpus.append(textbook)

keeps = [evaluate(top_math, r) for r in corpus]
print("top-math over the corpus:", keeps)
verdict, leaf = explain(top_math, algebra)
print("why the sparse algebra record fails:", leaf)

combined = parse_filter(f"({to_text(top_math)}) and ml_math_score > 0.8")
print("composed with a score floor:",
      [evaluate(combined, r) for r in corpus])
