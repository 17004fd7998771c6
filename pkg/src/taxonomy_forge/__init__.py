"""Corpus curation and taxonomy evaluation toolkit.

A library (plus a ``taxonomy-forge`` batch CLI) for building annotated
web-document datasets and measuring annotation quality:

- ``records``: the document record model, content-hash ids, JSONL
  round-tripping, and long-document chunking.
- ``dedup``: exact and MinHash/LSH near-duplicate removal.
- ``signals``: vectorized lexical quality signals and the three-rule
  keep/reject chain.
- ``filters``: a filter-expression DSL with code-prefix semantics and
  the eight preset dataset filters.
- ``decontam``: n-gram Bloom-filter decontamination against evaluation
  sets.
- ``agreement``: overlap-aware observed/expected agreement and kappa
  with a closed-form expected-agreement model.
- ``redundancy``: pairwise normalized mutual information between
  annotation categories.
- ``recall``: gold-URL domain recall for filter evaluation.
"""

from .agreement import (AgreementReport, AnnotatorModel, CategoryAgreement,
                        agree_unweighted, agree_weighted, annotator_kappa,
                        expected_agreement, fit_annotator_model, kappa,
                        observed_agreement)
from .decontam import (NGramBloom, build_filter, decontaminate,
                       is_contaminated, normalize_tokens)
from .dedup import (ClusterStats, MinHashParams, MinHashSignature, StageStats,
                    cluster_and_select, exact_dedup, jaccard, lsh_band_keys,
                    minhash_signature, signature_similarity)
from .filters import (DCLM_BASELINE_THRESH, PRESET_NAMES, FilterError,
                      FilterStats, evaluate, explain, parse_filter,
                      prefix_match, preset, run_filter, to_text)
from .recall import (BUILTIN_GOLD_SETS, GoldUrlSet, RecallReport,
                     load_gold_set, match_gold, normalize_url,
                     recall_and_kept)
from .records import (ANNOTATION_CATEGORIES, METRIC_CATEGORIES,
                      CategoryAnnotation, DocumentRecord, RecordError,
                      chunk_text, doc_id, label_set, parse_record,
                      primary_label, read_records, record_rng,
                      serialize_record, write_records)
from .redundancy import (DEFAULT_NMI_EXCLUSIONS, ContingencyTable, NmiReport,
                         joint_counts, mean_nmi, nmi, pairwise_nmi)
from .signals import (FilterDecision, QualitySignals, apply_rules,
                      compute_signals, compute_signals_batch, load_badwords)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # records
    "ANNOTATION_CATEGORIES", "METRIC_CATEGORIES", "CategoryAnnotation",
    "DocumentRecord", "RecordError", "chunk_text", "doc_id", "label_set",
    "parse_record", "primary_label", "read_records", "record_rng",
    "serialize_record", "write_records",
    # dedup
    "ClusterStats", "MinHashParams", "MinHashSignature", "StageStats",
    "cluster_and_select", "exact_dedup", "jaccard", "lsh_band_keys",
    "minhash_signature", "signature_similarity",
    # signals
    "FilterDecision", "QualitySignals", "apply_rules", "compute_signals",
    "compute_signals_batch", "load_badwords",
    # filters
    "DCLM_BASELINE_THRESH", "PRESET_NAMES", "FilterError", "FilterStats",
    "evaluate", "explain", "parse_filter", "prefix_match", "preset",
    "run_filter", "to_text",
    # decontam
    "NGramBloom", "build_filter", "decontaminate", "is_contaminated",
    "normalize_tokens",
    # agreement
    "AgreementReport", "AnnotatorModel", "CategoryAgreement",
    "agree_unweighted", "agree_weighted", "annotator_kappa",
    "expected_agreement", "fit_annotator_model", "kappa",
    "observed_agreement",
    # redundancy
    "DEFAULT_NMI_EXCLUSIONS", "ContingencyTable", "NmiReport", "joint_counts",
    "mean_nmi", "nmi", "pairwise_nmi",
    # recall
    "BUILTIN_GOLD_SETS", "GoldUrlSet", "RecallReport", "load_gold_set",
    "match_gold", "normalize_url", "recall_and_kept",
]
