"""
Quality signals and the keep/reject rule chain
==============================================

Each document gets a vector of cheap statistical signals: repeated
n-gram mass, vocabulary diversity, non-alphabetic fraction, bad-word
hits. A three-stage rule chain turns the vector into a verdict:

  rule 1  structural repetition   -> reject, no appeal
  rule 2  math / code classifier  -> keep, bypassing rule 3
  rule 3  fluff and language      -> reject what remains

The ordering is the point: a looping page full of equations is still a
looping page, but a terse code listing that trips the non-alphabetic
check deserves its classifier rescue.
"""

from dataclasses import replace

from taxonomy_forge.signals import (RULE_1_CONDITIONS, RULE_2_CONDITIONS,
                                    RULE_3_CONDITIONS, apply_rules,
                                    compute_signals)

# ---------------------------------------------------------------
# The signal vector for ordinary prose.
# ---------------------------------------------------------------

prose = " ".join(
    f"paragraph {i} develops the argument with fresh detail {i * i}"
    for i in range(12))
s = compute_signals(prose)
print("word_count:          ", s.word_count)
print("frac_chars_top_2gram:", round(s.frac_chars_top_2gram, 4))
print("frac_chars_dupe_5grams:", round(s.frac_chars_dupe_5grams, 4))
print("frac_unique_words:   ", round(s.frac_unique_words, 4))
print("frac_no_alph_words:  ", round(s.frac_no_alph_words, 4))

# ---------------------------------------------------------------
# Repetition signals in action: a page that loops one 11-word chorus
# piles mass onto the duplicated-5-gram fraction.
# ---------------------------------------------------------------

chorus = "the quick brown fox jumps over the lazy dog every day "
looping = chorus * 6
print("\nlooping page dupe-5gram fraction:",
      round(compute_signals(looping).frac_chars_dupe_5grams, 4))

# ---------------------------------------------------------------
# Bad-word counting uses a caller-supplied lexicon; matching is by
# whole lowercased token.
# ---------------------------------------------------------------

lexicon = frozenset({"grawlix", "blazes"})
spicy = ("what the grawlix is this, blazes and Grawlix again " * 4
         + "plus ordinary words to pad the count out to fifty or so "
         * 3)
print("bad-word hits:", compute_signals(spicy, badwords=lexicon).ldnoobw_words)

# ---------------------------------------------------------------
# The rule chain. Verdicts carry the first condition that fired, so
# rejections are attributable.
# ---------------------------------------------------------------

print("\nrule tables:")
for name, table in (("1", RULE_1_CONDITIONS), ("2", RULE_2_CONDITIONS),
                    ("3", RULE_3_CONDITIONS)):
    print(f"  rule {name}: " + ", ".join(f"{f} {op} {t}"
                                         for f, op, t in table))

# Two thirds of these words carry no letters; every token appears
# twice with different neighbors so no repetition signal fires first.
nums = [str(10 + i) for i in range(20)]
words = ["alpha", "bravo", "carol", "delta", "echos",
         "fable", "gusto", "haven", "irons", "jolly"]
halves = ([x for k in range(10)
           for x in (nums[2 * k], nums[2 * k + 1], words[k])],
          [x for k in range(10)
           for x in (nums[(2 * k + 5) % 20], words[(k + 3) % 10],
                     nums[(2 * k + 12) % 20])])
numeric_page = " ".join(halves[0] + halves[1])

cases = {
    "ordinary prose": replace(compute_signals(prose), ml_english_score=0.9),
    "too short": compute_signals("just a handful of words"),
    "looping chorus": compute_signals(looping),
    "mostly numbers": replace(compute_signals(numeric_page),
                              ml_english_score=0.9),
}
# External classifier scores arrive from upstream models; splice a
# math score onto the numeric page to show the rule-2 rescue.
cases["mostly numbers + math score"] = replace(
    cases["mostly numbers"], ml_math_score=0.85, ml_english_score=0.4)
cases["non-english prose"] = replace(compute_signals(prose),
                                     ml_english_score=0.2)

print()
for label, signals in cases.items():
    decision = apply_rules(signals)
    fired = decision.rule_fired or "clean"
    print(f"  {label:28} -> {decision.verdict:6} ({fired})")

# An absent ml_english_score rejects by default; corpora without a
# language model in front can disable that.
bare = compute_signals(prose)
print("\nabsent english score, default: ",
      apply_rules(bare).verdict, f"({apply_rules(bare).rule_fired})")
lenient = apply_rules(bare, english_absent_rejects=False)
print("absent english score, disabled:", lenient.verdict)
