"""``medread`` command line: batch scoring, tagging, tuning and evaluation runs.

Exit codes: 0 success, 1 usage error, 2 data validation failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import corpus as corpus_mod
from .corpus import CorpusError, atomic_write_text, filter_split, load_corpus, per_source_summary
from .features import ResourceTables, extract, features_csv, load_resources
from .ingest import ingest
from .jargon import build_lexicon, format_lexicon, format_predictions, load_lexicon, load_word_list
from .metrics import ALL_METRICS, JAR_BASES, UnigramProvider, format_alpha_file, read_alpha_file
from .pipeline import base_scores, jar_scores, lexicon_spans, resolve_spans, tune_alphas
from .spaneval import MATCH_MODES, result_rows
from .stats import (
    BootstrapConfig,
    UndefinedStatistic,
    feature_correlations,
    gold_ratings,
    grouped_correlation,
    length_bucketed_correlation,
    pearson,
    quartile_boundaries,
)
from .taxonomy import Granularity, SpanCategory

log = logging.getLogger("medread")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3

FREQUENCY_FILE = "frequency.tsv"
COMMON_FILE = "common2000.txt"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


# --- output -----------------------------------------------------------------


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return None if math.isnan(value) else round(value, 4)
    return value


def render(rows: Sequence[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: _cell(r.get(c)) for c in columns} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(columns)
    for r in rows:
        writer.writerow(["" if _cell(r.get(c)) is None else _cell(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


# --- shared loading ---------------------------------------------------------


def _resources_dir(args) -> Path | None:
    value = args.resources or os.environ.get("MEDREAD_RESOURCES")
    return Path(value) if value else None


def _provider(args) -> UnigramProvider | None:
    path = getattr(args, "freq", None)
    if not path:
        directory = _resources_dir(args)
        if directory is not None and (directory / FREQUENCY_FILE).is_file():
            path = directory / FREQUENCY_FILE
    return UnigramProvider.from_tsv(path) if path else None


def _common_words(args) -> frozenset[str]:
    path = getattr(args, "common_words", None)
    if not path:
        directory = _resources_dir(args)
        if directory is not None and (directory / COMMON_FILE).is_file():
            path = directory / COMMON_FILE
    return load_word_list(path) if path else frozenset()


def _load(args) -> tuple[list, list]:
    full = load_corpus(args.corpus, strict=not getattr(args, "lenient", False))
    return full, filter_split(full, *args.split.split(","))


def _spans(args, subset, full):
    lexicon = load_lexicon(args.lexicon) if getattr(args, "lexicon", None) else None
    return resolve_spans(args.jargon, subset, full, lexicon, _common_words(args), args.min_count)


def _metrics(text: str) -> list[str]:
    names = ALL_METRICS if text == "all" else [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in names if m not in ALL_METRICS]
    if unknown:
        raise UsageError(f"unknown metric(s): {', '.join(unknown)}")
    return list(names)


def _grid(text: str) -> tuple[float, float, float]:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--grid expects LO:HI:STEP, got {text!r}") from None
    return lo, hi, step


def _alphas(args, full, needed: Sequence[str], provider) -> dict[str, float]:
    if not needed:
        return {}
    if args.alpha_file:
        alphas = read_alpha_file(args.alpha_file)
        missing = [m for m in needed if m not in alphas]
        if missing:
            raise UsageError(f"{args.alpha_file} has no alpha for {', '.join(missing)}")
        return alphas
    dev = filter_split(full, "dev")
    found = tune_alphas(dev, needed, provider, grid=_grid(args.grid), count=args.count)
    for m, res in found.items():
        log.info("tuned %s-jar alpha=%g (dev pearson %.4f)", m, res.alpha, res.pearson)
    return {m: res.alpha for m, res in found.items()}


def _score_all(args, full, subset, metrics: Sequence[str]) -> dict[str, dict]:
    """metric -> {id -> MetricScore} for base and -jar metrics."""
    provider = _provider(args)
    wanted_bases = {m.removesuffix("-jar") for m in metrics}
    if "rsrs" in wanted_bases and provider is None:
        raise UsageError("rsrs needs a frequency table (--freq or frequency.tsv under --resources)")
    jar_needed = [m for m in JAR_BASES if f"{m}-jar" in metrics]
    alphas = _alphas(args, full, jar_needed, provider)
    spans = _spans(args, subset, full) if jar_needed else {}
    out: dict[str, dict] = {}
    base_cache = {}
    for m in sorted(wanted_bases, key=ALL_METRICS.index):
        base_cache[m] = base_scores(subset, m, provider, jobs=args.jobs)
    for m in metrics:
        if m.endswith("-jar"):
            b = m.removesuffix("-jar")
            out[m] = jar_scores(base_cache[b], spans, alphas[b], args.count)
        else:
            out[m] = base_cache[m]
    return out


# --- subcommands ------------------------------------------------------------


def cmd_ingest(args) -> int:
    with open(args.mapping, encoding="utf-8") as fh:
        mapping = json.load(fh)
    records = ingest(args.input, mapping)
    if args.splits:
        records = corpus_mod.apply_splits(records, corpus_mod.load_split_tsv(args.splits))
    violations = corpus_mod.validate(records)
    if violations:
        bad = {v.sentence_id for v in violations}
        for v in violations:
            print(f"{v.sentence_id}\t{v.rule}\t{v.message}", file=sys.stderr)
        if not args.lenient:
            print(f"{len(violations)} violations; nothing written", file=sys.stderr)
            return EXIT_DATA
        seen, kept = set(), []
        for r in records:
            if r.id not in bad and r.id not in seen:
                kept.append(r)
                seen.add(r.id)
        records = kept
    emit("".join(corpus_mod.dumps_sentence(r) + "\n" for r in records), args.out)
    print(f"{len(records)} sentences", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    records, skipped = corpus_mod.read_corpus(args.corpus, strict=False)
    violations = skipped + corpus_mod.validate(records)
    for v in violations:
        print(f"{v.sentence_id}\t{v.rule}\t{v.message}", file=sys.stderr)
    print(f"{len(violations)} violations")
    return EXIT_OK if not violations else EXIT_DATA


SCORE_COLUMNS = (
    "id", "source", "side", "split", "metric", "value",
    "n_words", "n_syllables", "n_chars", "n_polysyllables", "jargon_spans", "alpha", "scale",
)


def cmd_score(args) -> int:
    full, subset = _load(args)
    metrics = _metrics(args.metric)
    scored = _score_all(args, full, subset, metrics)
    meta = {s.id: s for s in subset}
    rows = []
    for sid in sorted(meta):
        s = meta[sid]
        for m in metrics:
            ms = scored[m].get(sid)
            if ms is None:
                continue
            row = {"id": sid, "source": s.source, "side": s.side, "split": s.split, "metric": m, "value": ms.value}
            row.update(ms.components)
            rows.append(row)
    emit(render(rows, SCORE_COLUMNS, args.format), args.out)
    return EXIT_OK


def cmd_tag(args) -> int:
    full, subset = _load(args)
    if args.lexicon:
        lexicon = load_lexicon(args.lexicon)
    else:
        lexicon = build_lexicon(filter_split(full, "train"), args.min_count)
    if args.save_lexicon:
        atomic_write_text(args.save_lexicon, format_lexicon(lexicon))
    predictions = lexicon_spans(subset, lexicon, _common_words(args))
    emit(format_predictions(predictions), args.out)
    return EXIT_OK


def cmd_tune_alpha(args) -> int:
    full, _ = _load(args)
    dev = filter_split(full, *args.split.split(","))
    metrics = [m.removesuffix("-jar") for m in _metrics(args.metric)] if args.metric != "all" else list(JAR_BASES)
    bad = [m for m in metrics if m not in JAR_BASES]
    if bad:
        raise UsageError(f"no jargon variant for: {', '.join(bad)}")
    provider = _provider(args)
    if "rsrs" in metrics and provider is None:
        if args.metric == "all":
            metrics.remove("rsrs")
            log.warning("no frequency table; skipping rsrs")
        else:
            raise UsageError("rsrs needs a frequency table (--freq or frequency.tsv under --resources)")
    spans = _spans(args, dev, full)
    found = tune_alphas(dev, metrics, provider, spans, _grid(args.grid), args.count)
    summary = "".join(f"{m}\t{r.alpha:g}\t{r.pearson:.4f}\n" for m, r in found.items())
    if args.out:
        atomic_write_text(args.out, format_alpha_file({m: r.alpha for m, r in found.items()}))
        sys.stderr.write("metric\talpha\tdev_pearson\n" + summary)
    else:
        sys.stdout.write("metric\talpha\tdev_pearson\n" + summary)
    return EXIT_OK


SPAN_COLUMNS = ("granularity", "match-mode", "tp", "fp", "fn", "p", "r", "f1")


def cmd_eval_spans(args) -> int:
    full, subset = _load(args)
    if args.jargon == "gold":
        raise UsageError("eval-spans needs predictions: --jargon lexicon or --jargon file=PATH")
    predicted = _spans(args, subset, full)
    pairs = [(list(s.spans), predicted[s.id], len(s.tokens)) for s in subset]
    granularities = [Granularity.parse(g) for g in args.granularity] if args.granularity else list(Granularity)
    modes = args.match or list(MATCH_MODES)
    emit(render(result_rows(pairs, granularities, modes), SPAN_COLUMNS, args.format), args.out)
    return EXIT_OK


READ_COLUMNS = ("group", "metric", "r", "ci_low", "ci_high", "n")


def _external_scores(path: str) -> dict[str, float]:
    with open(path, encoding="utf-8", newline="") as fh:
        if path.endswith(".jsonl"):
            return {o["id"]: float(o["value"]) for o in map(json.loads, filter(str.strip, fh))}
        return {row["id"]: float(row["value"]) for row in csv.DictReader(fh)}


def cmd_eval_readability(args) -> int:
    full, subset = _load(args)
    gold = gold_ratings(subset)
    series: dict[str, dict[str, float]] = {}
    if args.metric:
        for m, scored in _score_all(args, full, subset, _metrics(args.metric)).items():
            series[m] = {sid: ms.value for sid, ms in scored.items()}
    for item in args.scores or []:
        name, _, path = item.rpartition("=")
        series[name or Path(path).stem] = _external_scores(path)
    if not series:
        raise UsageError("nothing to evaluate: give --metric and/or --scores")
    boot = BootstrapConfig(args.bootstrap, args.level, args.seed) if args.bootstrap else None
    rows = []
    if args.length_buckets:
        if args.length_buckets == "quartiles":
            boundaries = quartile_boundaries(filter_split(full, "dev") or subset)
        else:
            boundaries = [float(b) for b in args.length_buckets.split(",")]
        for name, scores in series.items():
            result = length_bucketed_correlation(scores, gold, subset, boundaries, "kendall-tau-like", boot, name)
            rows.extend(r.as_row() for r in result.results)
            for label in result.skipped:
                log.warning("%s: bucket %s skipped", name, label)
    else:
        for name, scores in series.items():
            grouped = grouped_correlation(scores, gold, subset, args.group_by, "pearson", boot, name)
            rows.extend(grouped.rows())
            for label in grouped.skipped:
                log.warning("%s: group %s skipped (fewer than 3 rated sentences)", name, label)
    emit(render(rows, READ_COLUMNS, args.format), args.out)
    return EXIT_OK


def cmd_features(args) -> int:
    full, subset = _load(args)
    directory = _resources_dir(args)
    if directory is None:
        raise UsageError("features needs --resources DIR (or MEDREAD_RESOURCES)")
    resources: ResourceTables = load_resources(directory)
    spans = _spans(args, subset, full)
    vectors = {}
    for s in subset:
        try:
            vectors[s.id] = extract(s, resources, spans[s.id])
        except ValueError as exc:
            log.warning("%s: %s", s.id, exc)
    if args.correlate:
        ranked = feature_correlations(vectors, gold_ratings(subset))
        rows = [{"feature": fc.feature, "r": fc.r, "n": fc.n} for fc in ranked]
        emit(render(rows, ("feature", "r", "n"), args.format), args.out)
    else:
        emit(features_csv(vectors), args.out)
    return EXIT_OK


JARGON_TABLE_ROWS = {
    "Medical Jargon": {SpanCategory.GOOGLE_EASY, SpanCategory.GOOGLE_HARD, SpanCategory.MEDICAL_NAME_ENTITY},
    "Abbreviation": {SpanCategory.MEDICAL_ABBREVIATION, SpanCategory.GENERAL_ABBREVIATION},
    "General Complex": {SpanCategory.GENERAL_COMPLEX},
    "Multi-sense": {SpanCategory.MULTI_SENSE},
    "All Categories": set(SpanCategory),
}


def jargon_table(sentences, spans) -> list[dict]:
    """Pearson of span count / token count / token share per category group with gold ratings."""
    rated = [s for s in sentences if s.rating is not None]
    gold = [s.rating for s in rated]
    rows = []
    for name, cats in JARGON_TABLE_ROWS.items():
        row: dict[str, Any] = {"type": name, "n": len(rated)}
        n_spans, n_tokens, pct = [], [], []
        for s in rated:
            chosen = [sp for sp in spans[s.id] if sp.category in cats]
            n_spans.append(len(chosen))
            n_tokens.append(sum(sp.end - sp.start for sp in chosen))
            pct.append(n_tokens[-1] / len(s.tokens))
        for col, xs in (("spans", n_spans), ("tokens", n_tokens), ("pct_tokens", pct)):
            try:
                row[col] = pearson(xs, gold)
            except UndefinedStatistic:
                row[col] = None
        rows.append(row)
    return rows


def cmd_report(args) -> int:
    full, subset = _load(args)
    if args.table == "sources":
        rows = [r.as_row() for r in per_source_summary(subset)]
        columns = list(rows[0]) if rows else ["source", "side", "n", "mean_rating", "q1", "median", "q3"]
    else:
        rows = jargon_table(subset, _spans(args, subset, full))
        columns = ["type", "spans", "tokens", "pct_tokens", "n"]
    emit(render(rows, columns, args.format), args.out)
    return EXIT_OK


# --- parser -----------------------------------------------------------------

COMMANDS = {
    "ingest": cmd_ingest,
    "validate": cmd_validate,
    "score": cmd_score,
    "tag": cmd_tag,
    "tune-alpha": cmd_tune_alpha,
    "eval-spans": cmd_eval_spans,
    "eval-readability": cmd_eval_readability,
    "features": cmd_features,
    "report": cmd_report,
}


# Parent parsers are rebuilt per subcommand: argparse shares action objects
# between children, so set_defaults on one subcommand would leak into others.


def _common() -> _Parser:
    p = _Parser(add_help=False)
    p.add_argument("--config", help="JSON file of option defaults (flags override)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _data() -> _Parser:
    p = _Parser(add_help=False)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="all", help="comma list of train,dev,test or 'all'")
    p.add_argument("--lenient", action="store_true", help="skip invalid records instead of failing")
    return p


def _span_opts() -> _Parser:
    p = _Parser(add_help=False)
    p.add_argument("--jargon", default="gold", help="gold | lexicon | file=PATH")
    p.add_argument("--lexicon", help="lexicon TSV (default: build from the train split)")
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--common-words", help="word list suppressing abbreviation hits")
    p.add_argument("--resources", help="resource directory (default: $MEDREAD_RESOURCES)")
    return p


def _scoring() -> _Parser:
    p = _Parser(add_help=False)
    p.add_argument("--alpha-file", help="TSV metric<TAB>alpha (default: tune on dev)")
    p.add_argument("--grid", default="0:20:0.05", help="alpha grid LO:HI:STEP")
    p.add_argument("--count", choices=("binary", "medical"), default="binary",
                   help="which spans the -jar term counts")
    p.add_argument("--freq", help="word<TAB>count table for rsrs")
    return p


def build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    parser = _Parser(prog="medread", description="Readability measurement for medical text.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = sub.add_parser("ingest", parents=[_common()], help="convert a released dataset to corpus JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--mapping", required=True, help="JSON field mapping")
    p.add_argument("--splits", help="TSV id<TAB>split")
    p.add_argument("--lenient", action="store_true")
    subs["ingest"] = p

    p = sub.add_parser("validate", parents=[_common()], help="check corpus invariants")
    p.add_argument("--corpus", required=True)
    subs["validate"] = p

    p = sub.add_parser("score", parents=[_common(), _data(), _span_opts(), _scoring()], help="score sentences")
    p.add_argument("--metric", default="length,fkgl,ari,smog")
    subs["score"] = p

    p = sub.add_parser("tag", parents=[_common(), _data(), _span_opts()],
                       help="tag complex spans with a lexicon")
    p.add_argument("--save-lexicon")
    p.set_defaults(split="test")
    subs["tag"] = p

    p = sub.add_parser("tune-alpha", parents=[_common(), _data(), _span_opts(), _scoring()],
                       help="grid-search -jar weights")
    p.add_argument("--metric", default="fkgl,ari,smog")
    p.set_defaults(split="dev")
    subs["tune-alpha"] = p

    p = sub.add_parser("eval-spans", parents=[_common(), _data(), _span_opts()], help="span P/R/F1 against gold")
    p.add_argument("--granularity", action="append", choices=("binary", "3", "7"))
    p.add_argument("--match", action="append", choices=MATCH_MODES)
    p.set_defaults(split="test", jargon="lexicon")
    subs["eval-spans"] = p

    p = sub.add_parser("eval-readability", parents=[_common(), _data(), _span_opts(), _scoring()],
                       help="correlate metric scores with gold ratings")
    p.add_argument("--metric", default=None)
    p.add_argument("--scores", action="append", help="NAME=PATH of external scores (CSV id,value or JSONL)")
    p.add_argument("--group-by", choices=("source", "none"), default="source")
    p.add_argument("--bootstrap", type=int, default=0, help="bootstrap iterations (0 = no interval)")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--length-buckets", help="'quartiles' or comma list of word-count boundaries")
    p.set_defaults(split="test")
    subs["eval-readability"] = p

    p = sub.add_parser("features", parents=[_common(), _data(), _span_opts()],
                       help="extract linguistic features")
    p.add_argument("--correlate", action="store_true", help="rank features by Pearson with gold")
    subs["features"] = p

    p = sub.add_parser("report", parents=[_common(), _data(), _span_opts()],
                       help="per-source or jargon-correlation tables")
    p.add_argument("--table", choices=("sources", "jargon"), default="sources")
    subs["report"] = p
    return parser, subs


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser, subs = build_parser()
    pre = _Parser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config and known.command in subs:
        with open(known.config, encoding="utf-8") as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise UsageError("--config must hold a JSON object")
        subs[known.command].set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})
        for action in subs[known.command]._actions:
            if action.dest in config or action.dest.replace("_", "-") in config:
                action.required = False
    return parser.parse_args(argv)


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, ValueError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())
