"""
Domain recall: scoring a filter against trusted URL prefixes
============================================================

A filter that keeps 2% of the corpus might be precise or might be
blind. The check that distinguishes them: take a human-vetted list of
base URLs dense in the target domain, treat documents under those
prefixes as ground truth, and measure how many the filter retains.

    recall = kept gold documents / all gold documents
    kept   = kept documents      / all documents

A good domain filter scores high recall at low kept: it finds the
trusted pages while discarding most of everything else.
"""

import numpy as np

from taxonomy_forge.filters import parse_filter, preset
from taxonomy_forge.recall import (GoldUrlSet, load_gold_set, match_gold,
                                   normalize_url, recall_and_kept)
from taxonomy_forge.records import CategoryAnnotation, DocumentRecord

# ---------------------------------------------------------------
# URL normalization: scheme and a single leading www. are dropped
# and the host lowercased, so gold entries match however a crawl
# spelled the address.
# ---------------------------------------------------------------

for url in ("https://www.Tutorial.Math.LAMAR.edu/classes/calcI",
            "http://dlmf.nist.gov/1.2",
            "dlmf.nist.gov/1.2"):
    print(f"{url:48} -> {normalize_url(url)}")

# ---------------------------------------------------------------
# Two vetted prefix lists ship with the package.
# ---------------------------------------------------------------

math_gold = load_gold_set("math")
code_gold = load_gold_set("web-code")
print(f"\nbuilt-in gold sets: math ({len(math_gold.base_urls)} prefixes), "
      f"web-code ({len(code_gold.base_urls)} prefixes)")
print("sample math prefixes:", ", ".join(math_gold.base_urls[:3]))

url = "https://www.dlmf.nist.gov/idx/B"
print(f"match_gold({url!r}) = {match_gold(url, math_gold)}")

# ---------------------------------------------------------------
# A synthetic corpus: 1000 documents, 60 of them under math gold
# prefixes. Gold pages are mostly annotated as mathematics (fdc 51x)
# but not uniformly, and some non-gold pages are mathematics too,
# as in any real crawl.
# ---------------------------------------------------------------

rng = np.random.default_rng(23)
gold_prefixes = math_gold.base_urls
corpus = []
for i in range(1000):
    is_gold = i < 60
    if is_gold:
        url = "https://" + gold_prefixes[i % len(gold_prefixes)] + f"/page{i}"
        fdc = "512" if rng.random() < 0.85 else "400"
    else:
        url = f"https://site{i}.example.com/article"
        fdc = "512" if rng.random() < 0.10 else str(rng.integers(100, 900))
    corpus.append(DocumentRecord(
        text=f"document {i} body text",
        url=url,
        annotations={"fdc": CategoryAnnotation(primary=fdc)},
        scores={"ml_math_score": float(np.clip(
            rng.normal(0.75 if fdc == "512" else 0.1, 0.15), 0, 1))}))

# ---------------------------------------------------------------
# Any predicate works as the filter; FilterExpr trees evaluate
# directly. Compare a taxonomy filter against a classifier cut.
# ---------------------------------------------------------------

by_label = parse_filter('fdc.primary prefix_in {"51"}')
by_score = parse_filter("ml_math_score > 0.5")

for name, keep in (("taxonomy fdc=51*", by_label),
                   ("classifier > 0.5", by_score)):
    r = recall_and_kept(corpus, keep, math_gold)
    print(f"\n{name}:")
    print(f"  recall = {r.recall:.3f}  ({r.n_kept_gold}/{r.n_gold} gold kept)")
    print(f"  kept   = {r.kept:.3f}  ({r.n_kept}/{r.n_total} overall)")

# ---------------------------------------------------------------
# Custom gold sets load from lines or files; '#' comments and blanks
# are skipped and entries are normalized on construction.
# ---------------------------------------------------------------

house = GoldUrlSet.from_lines([
    "# internal review list",
    "https://www.site77.example.com/",
    "site812.example.com",
], name="house-list")
print("\ncustom set prefixes:", house.base_urls)
r = recall_and_kept(corpus, lambda rec: True, house)
print(f"keep-everything recall over it: {r.recall:.1f} "
      f"({r.n_gold} gold docs found)")
