"""Batch command-line interface over the curation pipeline and metrics.

Commands read newline-delimited JSON records on --input (default
stdin), write transformed records to --output (default stdout), and
print one machine-readable JSON summary line to stderr, so stages
compose with ordinary pipes::

    taxonomy-forge dedup    --input crawl.jsonl --output unique.jsonl
    taxonomy-forge signals  --input unique.jsonl --jobs 8 --output scored.jsonl
    taxonomy-forge filter   --preset top-math --input scored.jsonl
    taxonomy-forge decontam --bloom eval.bloom --input kept.jsonl
    taxonomy-forge metrics  kappa --input cand.jsonl --gold g1.jsonl --gold g2.jsonl
    taxonomy-forge metrics  nmi --input labeled.jsonl --report nmi.json
    taxonomy-forge metrics  recall --input crawl.jsonl --gold math --preset top-math
    taxonomy-forge chunk    --input long.jsonl --seed 7

Exit codes: 0 success, 1 configuration error (bad flags, unknown
preset, unreadable config, missing referenced file), 2 data error (a
malformed record, reported with its line number). Output files are
written to a temporary file and renamed into place on success, so a
failing run leaves no partial output.

A YAML config file (--config) supplies per-command parameter tables;
command-line flags win over config values. Recognized sections::

    seed: 0
    jobs: 1
    dedup:    {num_perms, bands, rows, shingle_width, verify, threshold}
    signals:  {badwords, lowercase, apply_rules, english_absent_rejects}
    filter:   {preset, expr}
    decontam: {bloom, build_from, width, target_fp, hit_threshold}
    metrics:  {weighted, categories, exclusions}
    chunk:    {max_chars}

Determinism: the same config and seed produce byte-identical outputs,
independent of --jobs. Chunking randomness is keyed per record from
(seed, record id); parallel signal computation processes fixed-size
batches in input order.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from collections import Counter
from contextlib import contextmanager, suppress
from typing import Callable, Iterable, Iterator, TextIO

import yaml

from . import decontam as decontam_mod
from . import dedup as dedup_mod
from .agreement import AgreementReport, annotator_kappa
from .filters import (FilterError, FilterExpr, PRESET_NAMES, evaluate,
                      parse_filter, preset, run_filter)
from .recall import (BUILTIN_GOLD_SETS, GoldUrlSet, load_gold_set,
                     recall_and_kept)
from .records import (METRIC_CATEGORIES, DocumentRecord, RecordError,
                      chunk_text, label_set, read_records, record_rng,
                      serialize_record)
from .redundancy import DEFAULT_NMI_EXCLUSIONS, pairwise_nmi
from .signals import apply_rules, compute_signals_batch, load_badwords

__all__ = ["main", "ConfigError"]

_BATCH = 256


class ConfigError(Exception):
    """Invalid flags or config; maps to exit code 1."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise ConfigError(message)


# Config and I/O plumbing ---------------------------------------------------

_KNOWN_SECTIONS = frozenset(("seed", "jobs", "dedup", "signals", "filter",
                             "decontam", "metrics", "chunk"))


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse config {path!r}: {e}") from e
    if config is None:
        return {}
    if not isinstance(config, dict):
        raise ConfigError(f"config {path!r} must be a mapping")
    unknown = set(config) - _KNOWN_SECTIONS
    if unknown:
        raise ConfigError(
            f"unknown config sections {sorted(unknown)}; valid sections: "
            f"{sorted(_KNOWN_SECTIONS)}")
    return config


def _section(config: dict, name: str) -> dict:
    section = config.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"config section {name!r} must be a mapping")
    return section


def _resolve(flag_value, section: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    return section.get(key, default)


@contextmanager
def _open_input(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdin
        return
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read input {path!r}: {e}") from e
    with fh:
        yield fh


@contextmanager
def _atomic_output(path: str | None) -> Iterator[TextIO]:
    """Write to stdout, or atomically to a file: a temporary sibling is
    renamed over the target on success and removed on any failure."""
    if path is None:
        yield sys.stdout
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".taxonomy-forge-")
    try:
        fh = os.fdopen(fd, "w", encoding="utf-8")
        try:
            yield fh
        finally:
            fh.close()
        os.replace(tmp, path)
    except BaseException:
        with suppress(OSError):
            os.unlink(tmp)
        raise


def _emit_summary(summary: dict) -> None:
    sys.stderr.write(json.dumps(summary, sort_keys=True) + "\n")


def _removed_pct(n_in: int, n_out: int) -> float:
    return round(100.0 * (n_in - n_out) / n_in, 1) if n_in else 0.0


def _batched(items: Iterable, size: int) -> Iterator[list]:
    batch: list = []
    for item in items:
        batch.append(item)
        if len(batch) == size:
            yield batch
            batch = []
    if batch:
        yield batch


def _write_stream(records: Iterable[DocumentRecord], out: TextIO) -> None:
    for record in records:
        out.write(serialize_record(record))
        out.write("\n")


# dedup ---------------------------------------------------------------------

def cmd_dedup(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    section = _section(config, "dedup")
    seed = _resolve(args.seed, config, "seed", 0)
    try:
        params = dedup_mod.MinHashParams(
            num_perms=section.get("num_perms", 126),
            bands=section.get("bands", 14),
            rows=section.get("rows", 9),
            shingle_width=section.get("shingle_width", 5),
            seed=seed)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    verify = bool(section.get("verify", False))
    threshold = float(section.get("threshold", 0.7))

    with _open_input(args.input) as inp:
        unique, exact_stats = dedup_mod.exact_dedup(read_records(inp))
        survivors, near_stats = dedup_mod.cluster_and_select(
            unique, params, verify=verify, threshold=threshold)
    with _atomic_output(args.output) as out:
        _write_stream(survivors, out)

    n_in, n_out = exact_stats.n_in, near_stats.n_out
    _emit_summary({
        "stage": "dedup", "in": n_in, "out": n_out,
        "removed_pct": _removed_pct(n_in, n_out),
        "exact": {"in": exact_stats.n_in, "out": exact_stats.n_out},
        "near": {"in": near_stats.n_in, "out": near_stats.n_out,
                 "clusters": near_stats.n_clusters},
    })
    return 0


# signals -------------------------------------------------------------------

_WORKER_STATE: dict = {}


def _init_signals_worker(badwords: frozenset, lowercase: bool) -> None:
    _WORKER_STATE["badwords"] = badwords
    _WORKER_STATE["lowercase"] = lowercase


def _signals_worker(texts: list[str]):
    return compute_signals_batch(texts, _WORKER_STATE["badwords"],
                                 lowercase=_WORKER_STATE["lowercase"])


def cmd_signals(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    section = _section(config, "signals")
    jobs = int(_resolve(args.jobs, config, "jobs", 1))
    if jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    lowercase = bool(section.get("lowercase", False))
    apply_rules_flag = bool(section.get("apply_rules", True))
    english_absent_rejects = bool(section.get("english_absent_rejects", True))
    badwords_path = section.get("badwords")
    badwords: frozenset = frozenset()
    if badwords_path is not None:
        try:
            badwords = load_badwords(badwords_path)
        except OSError as e:
            raise ConfigError(f"cannot read badwords {badwords_path!r}: {e}") \
                from e

    stats = {"in": 0, "out": 0}
    rejections: Counter = Counter()

    def merge_model_scores(record: DocumentRecord, computed):
        """Computed lexical signals replace stale ones, but ml_* scores
        and extra columns come from upstream models and are kept."""
        existing = record.signals
        if existing is None:
            return computed
        updates: dict = {}
        for name in ("ml_english_score", "ml_math_score", "ml_web_code_score"):
            value = getattr(existing, name)
            if value is not None and getattr(computed, name) is None:
                updates[name] = value
        if existing.extras:
            merged = dict(existing.extras)
            if computed.extras:
                merged.update(computed.extras)
            updates["extras"] = merged
        return dataclasses.replace(computed, **updates) if updates \
            else computed

    def handle(batch: list[DocumentRecord], signals_list) -> Iterator[str]:
        for record, signals in zip(batch, signals_list):
            stats["in"] += 1
            signals = merge_model_scores(record, signals)
            if apply_rules_flag:
                decision = apply_rules(
                    signals, english_absent_rejects=english_absent_rejects)
                if decision.verdict == "reject":
                    rejections[decision.rule_fired] += 1
                    continue
            stats["out"] += 1
            yield serialize_record(record.with_signals(signals))

    with _open_input(args.input) as inp, _atomic_output(args.output) as out:
        batches = _batched(read_records(inp), _BATCH)
        if jobs == 1:
            for batch in batches:
                signals_list = compute_signals_batch(
                    [r.text for r in batch], badwords, lowercase=lowercase)
                for line in handle(batch, signals_list):
                    out.write(line + "\n")
        else:
            import multiprocessing

            ctx = multiprocessing.get_context()
            with ctx.Pool(jobs, initializer=_init_signals_worker,
                          initargs=(badwords, lowercase)) as pool:
                for group in _batched(batches, jobs * 4):
                    results = pool.map(_signals_worker,
                                       [[r.text for r in b] for b in group])
                    for batch, signals_list in zip(group, results):
                        for line in handle(batch, signals_list):
                            out.write(line + "\n")

    summary = {
        "stage": "signals", "in": stats["in"], "out": stats["out"],
        "removed_pct": _removed_pct(stats["in"], stats["out"]),
        "rules_applied": apply_rules_flag,
    }
    if apply_rules_flag:
        summary["rule_rejections"] = dict(sorted(rejections.items()))
    _emit_summary(summary)
    return 0


# filter --------------------------------------------------------------------

def _resolve_filter_expr(preset_name: str | None, expr_text: str | None,
                         section: dict) -> FilterExpr:
    preset_name = preset_name if preset_name is not None \
        else section.get("preset")
    expr_text = expr_text if expr_text is not None else section.get("expr")
    if preset_name is not None and expr_text is not None:
        raise ConfigError("give either a preset or a filter expression, "
                          "not both")
    try:
        if preset_name is not None:
            return preset(preset_name)
        if expr_text is not None:
            return parse_filter(expr_text)
    except FilterError as e:
        raise ConfigError(str(e)) from e
    raise ConfigError("a filter requires --preset or --filter-expr "
                      "(or config filter.preset / filter.expr)")


def cmd_filter(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    expr = _resolve_filter_expr(args.preset, args.filter_expr,
                                _section(config, "filter"))
    with _open_input(args.input) as inp:
        kept, stats = run_filter(read_records(inp), expr)
        with _atomic_output(args.output) as out:
            _write_stream(kept, out)
    _emit_summary({
        "stage": "filter", "in": stats.n_in, "out": stats.n_kept,
        "removed_pct": _removed_pct(stats.n_in, stats.n_kept),
        "rejections": dict(sorted(stats.rejections.items())),
    })
    return 0


# decontam ------------------------------------------------------------------

def cmd_decontam(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    section = _section(config, "decontam")
    seed = _resolve(args.seed, config, "seed", 0)
    bloom_path = _resolve(args.bloom, section, "bloom", None)
    if bloom_path is None:
        raise ConfigError("decontam requires --bloom (the filter file)")
    build_from = section.get("build_from")
    width = int(section.get("width", decontam_mod.DEFAULT_NGRAM_WIDTH))
    target_fp = float(section.get("target_fp", decontam_mod.DEFAULT_TARGET_FP))
    hit_threshold = int(section.get("hit_threshold", 1))

    if build_from is not None:
        with _open_input(build_from) as fh:
            try:
                bloom = decontam_mod.build_filter(
                    (r.text for r in read_records(fh)), width=width,
                    target_fp=target_fp, seed=seed)
            except ValueError as e:
                raise ConfigError(str(e)) from e
        bloom.save(bloom_path)
        _emit_summary({
            "stage": "decontam-build", "ngrams": bloom.count,
            "m_bits": bloom.m, "k_hashes": bloom.k, "width": bloom.width,
        })
        if args.input is None:
            return 0
    else:
        try:
            bloom = decontam_mod.NGramBloom.load(bloom_path)
        except OSError as e:
            raise ConfigError(f"cannot read bloom filter {bloom_path!r}: {e}") \
                from e
        except ValueError as e:
            raise ConfigError(f"invalid bloom filter {bloom_path!r}: {e}") \
                from e

    with _open_input(args.input) as inp:
        survivors, stats = decontam_mod.decontaminate(
            read_records(inp), bloom, hit_threshold=hit_threshold)
        with _atomic_output(args.output) as out:
            _write_stream(survivors, out)
    _emit_summary({
        "stage": "decontam", "in": stats.n_in, "out": stats.n_out,
        "removed_pct": _removed_pct(stats.n_in, stats.n_out),
        "hit_threshold": hit_threshold,
    })
    return 0


# metrics -------------------------------------------------------------------

def _read_record_file(path: str) -> list[DocumentRecord]:
    with _open_input(path) as fh:
        return list(read_records(fh))


def _annotation_table(records: list[DocumentRecord],
                      categories: list[str]) -> dict:
    """category -> doc id -> label set, skipping docs that lack the
    category (unannotated is not the same as annotated-empty)."""
    table: dict = {c: {} for c in categories}
    for record in records:
        for category in categories:
            labels = label_set(record, category)
            if labels:
                table[category][record.id] = labels
    return table


def _report_dict(report: AgreementReport) -> dict:
    return {"p_o": report.p_o, "p_e": report.p_e, "kappa": report.kappa,
            "n_pairs": report.n_pairs, "weighted": report.weighted}


def _write_report(report: dict, path: str | None) -> None:
    with _atomic_output(path) as out:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")


def cmd_metrics_kappa(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    section = _section(config, "metrics")
    if args.input is None:
        raise ConfigError("metrics kappa requires --input (the candidate "
                          "annotations)")
    gold_paths = args.gold or []
    if len(gold_paths) != 2:
        raise ConfigError("metrics kappa requires exactly two --gold files")
    weighted = bool(section.get("weighted", False))
    categories = list(section.get("categories", METRIC_CATEGORIES))

    candidate = _annotation_table(_read_record_file(args.input), categories)
    gold1 = _annotation_table(_read_record_file(gold_paths[0]), categories)
    gold2 = _annotation_table(_read_record_file(gold_paths[1]), categories)
    results = annotator_kappa(candidate, gold1, gold2, weighted=weighted)

    per_category = {
        cat: {"vs_gold1": _report_dict(r.vs_gold1),
              "vs_gold2": _report_dict(r.vs_gold2),
              "mean_kappa": r.mean_kappa}
        for cat, r in results.items()
    }
    mean_kappa = (sum(r.mean_kappa for r in results.values()) / len(results)
                  if results else 0.0)
    _write_report({"weighted": weighted, "categories": per_category,
                   "mean_kappa": mean_kappa}, args.report)
    _emit_summary({"stage": "metrics-kappa", "categories": len(results),
                   "mean_kappa": mean_kappa, "weighted": weighted})
    return 0


def cmd_metrics_nmi(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    section = _section(config, "metrics")
    categories = list(section.get("categories", METRIC_CATEGORIES))
    exclusions = frozenset(section.get("exclusions",
                                       DEFAULT_NMI_EXCLUSIONS))
    with _open_input(args.input) as inp:
        reports = pairwise_nmi(read_records(inp), categories)

    included = [r.value for r in reports
                if r.value is not None
                and r.category_a not in exclusions
                and r.category_b not in exclusions]
    mean = sum(included) / len(included) if included else None
    _write_report({
        "pairs": [dataclasses.asdict(r) for r in reports],
        "mean_nmi": mean,
        "exclusions": sorted(exclusions),
    }, args.report)
    _emit_summary({"stage": "metrics-nmi", "pairs": len(reports),
                   "mean_nmi": mean})
    return 0


def _load_gold(spec_value: str) -> GoldUrlSet:
    if spec_value in BUILTIN_GOLD_SETS:
        return load_gold_set(spec_value)
    if os.path.exists(spec_value):
        return GoldUrlSet.from_file(spec_value)
    raise ConfigError(
        f"unknown gold set {spec_value!r}: not a builtin "
        f"({', '.join(sorted(BUILTIN_GOLD_SETS))}) and no such file")


def cmd_metrics_recall(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    gold_values = args.gold or []
    if len(gold_values) != 1:
        raise ConfigError("metrics recall requires exactly one --gold "
                          "(builtin set name or URL file)")
    gold = _load_gold(gold_values[0])

    filter_section = _section(config, "filter")
    keep: Callable[[DocumentRecord], bool]
    if (args.preset is not None or args.filter_expr is not None
            or filter_section.get("preset") is not None
            or filter_section.get("expr") is not None):
        expr = _resolve_filter_expr(args.preset, args.filter_expr,
                                    filter_section)
        keep = lambda record: evaluate(expr, record)
    else:
        keep = lambda record: True

    with _open_input(args.input) as inp:
        report = recall_and_kept(read_records(inp), keep, gold)
    _write_report(dataclasses.asdict(report), args.report)
    _emit_summary({"stage": "metrics-recall", "gold": gold.name,
                   "recall": report.recall, "kept": report.kept})
    return 0


# chunk ---------------------------------------------------------------------

def cmd_chunk(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    section = _section(config, "chunk")
    seed = _resolve(args.seed, config, "seed", 0)
    max_chars = int(section.get("max_chars", 30000))
    if max_chars < 9:
        raise ConfigError("chunk.max_chars must be at least 9")

    n_in = n_chunked = 0
    with _open_input(args.input) as inp, _atomic_output(args.output) as out:
        for record in read_records(inp):
            n_in += 1
            if len(record.text) > max_chars:
                rng = record_rng(seed, record.id)
                record = dataclasses.replace(
                    record, text=chunk_text(record.text, max_chars, rng))
                n_chunked += 1
            out.write(serialize_record(record) + "\n")
    _emit_summary({"stage": "chunk", "in": n_in, "out": n_in,
                   "chunked": n_chunked, "max_chars": max_chars})
    return 0


# Entry point ---------------------------------------------------------------

def _add_io_flags(parser: argparse.ArgumentParser, *, output: bool = True
                  ) -> None:
    parser.add_argument("--input", help="input records file (default stdin)")
    if output:
        parser.add_argument("--output",
                            help="output records file (default stdout)")
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--seed", type=int, help="pipeline seed (default 0)")
    parser.add_argument("--jobs", type=int,
                        help="worker processes for signal computation "
                             "(other stages are single-process; results do "
                             "not depend on this)")


def _add_filter_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", metavar="NAME",
                        help="preset filter, one of: "
                             + ", ".join(PRESET_NAMES))
    parser.add_argument("--filter-expr", metavar="EXPR",
                        help="filter expression in the textual grammar")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="taxonomy-forge",
                             description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="{dedup,signals,filter,decontam,"
                                        "metrics,chunk}")

    p = sub.add_parser("dedup", help="drop exact and near duplicates")
    _add_io_flags(p)
    p.set_defaults(func=cmd_dedup)

    p = sub.add_parser("signals",
                       help="compute quality signals and apply quality rules")
    _add_io_flags(p)
    p.set_defaults(func=cmd_signals)

    p = sub.add_parser("filter", help="keep records matching a filter")
    _add_io_flags(p)
    _add_filter_flags(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("decontam",
                       help="drop records overlapping an evaluation set")
    _add_io_flags(p)
    p.add_argument("--bloom", help="serialized n-gram filter file")
    p.set_defaults(func=cmd_decontam)

    p = sub.add_parser("metrics", help="agreement, redundancy, and recall")
    mode = p.add_subparsers(dest="mode", required=True,
                            metavar="{kappa,nmi,recall}")

    m = mode.add_parser("kappa", help="annotator agreement vs two golds")
    _add_io_flags(m, output=False)
    m.add_argument("--gold", action="append", metavar="PATH",
                   help="gold annotation file (give twice)")
    m.add_argument("--report", help="report JSON path (default stdout)")
    m.set_defaults(func=cmd_metrics_kappa)

    m = mode.add_parser("nmi", help="pairwise category redundancy")
    _add_io_flags(m, output=False)
    m.add_argument("--report", help="report JSON path (default stdout)")
    m.set_defaults(func=cmd_metrics_nmi)

    m = mode.add_parser("recall", help="gold-domain recall of a filter")
    _add_io_flags(m, output=False)
    _add_filter_flags(m)
    m.add_argument("--gold", action="append", metavar="NAME_OR_PATH",
                   help="builtin gold set name or URL list file")
    m.add_argument("--report", help="report JSON path (default stdout)")
    m.set_defaults(func=cmd_metrics_recall)

    p = sub.add_parser("chunk",
                       help="subsample long documents to a size budget")
    _add_io_flags(p)
    p.set_defaults(func=cmd_chunk)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as e:
        sys.stderr.write(f"taxonomy-forge: config error: {e}\n")
        return 1
    except RecordError as e:
        sys.stderr.write(f"taxonomy-forge: data error: {e}\n")
        return 2
    except ValueError as e:
        sys.stderr.write(f"taxonomy-forge: data error: {e}\n")
        return 2
    except OSError as e:
        sys.stderr.write(f"taxonomy-forge: config error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
