"""
Annotator agreement: observed overlap, chance correction, kappa
===============================================================

Comparing annotators on multi-label category assignments needs a
chance-agreement baseline that respects how often each annotator emits
zero, one, or two labels, and which labels it prefers. The closed form
here computes that expectation exactly from two fitted annotator
models; kappa then reads how far observed agreement rises above it.
"""

import numpy as np

from taxonomy_forge.agreement import (AnnotatorModel, agree_unweighted,
                                      agree_weighted, annotator_kappa,
                                      expected_agreement,
                                      fit_annotator_model, kappa,
                                      observed_agreement)

# ---------------------------------------------------------------
# Scoring one document: sets agree fully, partially, or not at all.
# The weighted variant scores |A ∩ B| / |A ∪ B|.
# ---------------------------------------------------------------

for a, b in ((["51"], ["51"]), (["51", "61"], ["51"]), (["61"], ["51"])):
    print(f"A={a!s:14} B={b!s:8} exact={agree_unweighted(a, b)} "
          f"jaccard={agree_weighted(a, b):.3f}")

pairs = [(["51"], ["51"]), (["51", "61"], ["51"]), (["61"], ["51"])]
print("observed agreement over the three pairs:",
      round(observed_agreement(pairs), 3))

# ---------------------------------------------------------------
# An annotator model: fertility distribution (0, 1, or 2 labels)
# plus a label-choice distribution.
# ---------------------------------------------------------------

careful = AnnotatorModel(fertility=(0.05, 0.80, 0.15),
                         label_dist={"51": 0.6, "61": 0.3, "00": 0.1})
trigger_happy = AnnotatorModel(fertility=(0.00, 0.30, 0.70),
                               label_dist={"51": 0.4, "61": 0.4, "00": 0.2})

for weighted in (False, True):
    p_e = expected_agreement(careful, trigger_happy, weighted=weighted)
    name = "weighted" if weighted else "unweighted"
    print(f"expected chance agreement ({name}): {p_e:.4f}")

# The closed form matches brute simulation; sanity-check one variant.
rng = np.random.default_rng(0)


def sample(model, n):
    labels = sorted(model.label_dist)
    w = np.array([model.label_dist[x] for x in labels])
    fert = rng.choice(3, size=n, p=model.fertility)
    return [[labels[i] for i in
             rng.choice(len(labels), size=f, replace=False, p=w)]
            for f in fert]


n = 200_000
sim = observed_agreement(list(zip(sample(careful, n),
                                  sample(trigger_happy, n))))
closed = expected_agreement(careful, trigger_happy)
print(f"simulated {sim:.4f} vs closed form {closed:.4f}")

# ---------------------------------------------------------------
# Fitting a model from raw annotations.
# ---------------------------------------------------------------

observed = [["51"], ["51", "61"], ["61"], ["51"], [], ["00"]]
fitted = fit_annotator_model(observed)
print("\nfitted fertility:", tuple(round(f, 3) for f in fitted.fertility))
print("fitted label preferences:",
      {k: round(v, 3) for k, v in sorted(fitted.label_dist.items())})

# ---------------------------------------------------------------
# Auditing a candidate annotator against two references: inputs map
# category -> document id -> label set, output is per-category
# reports against each reference plus their mean kappa.
# ---------------------------------------------------------------

docs = [f"d{i}" for i in range(8)]
subject = {
    "candidate": ["51", "51", "61", "00", "51", "61", "00", "51"],
    "gold1": ["51", "51", "61", "00", "51", "61", "51", "51"],
    "gold2": ["51", "61", "61", "00", "51", "61", "00", "00"],
}
annotations = {
    who: {"fdc": {d: [lab] for d, lab in zip(docs, labs)}}
    for who, labs in subject.items()
}
result = annotator_kappa(annotations["candidate"], annotations["gold1"],
                         annotations["gold2"])
cat = result["fdc"]
print(f"\nvs gold1: P_o={cat.vs_gold1.p_o:.3f} P_e={cat.vs_gold1.p_e:.3f} "
      f"kappa={cat.vs_gold1.kappa:.3f}")
print(f"vs gold2: P_o={cat.vs_gold2.p_o:.3f} P_e={cat.vs_gold2.p_e:.3f} "
      f"kappa={cat.vs_gold2.kappa:.3f}")
print(f"mean kappa: {cat.mean_kappa:.3f}")

# kappa is also available directly from the two probabilities:
print("kappa(0.94, 0.78) =", round(kappa(0.94, 0.78), 3))
