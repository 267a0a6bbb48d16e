"""Run every corpus-level analysis on an ingested corpus and write one CSV per table.

    python scripts/reproduce_tables.py --corpus corpus.jsonl --out results/ [--freq frequency.tsv]

Outputs:
  sources.csv          per-source/side rating quartiles and mean span counts
  side_gap.csv         mean simple vs. complex rating per source
  jargon.csv           Pearson of span counts/tokens/share with gold (full corpus and dev+test)
  readability.csv      per-source Pearson on test for base and -Jar metrics (alpha tuned on dev)
  alphas.tsv           tuned -Jar weights
  length_buckets.csv   Kendall tau-like within word-count quartiles on test
  span_eval.csv        lexicon tagger P/R/F1 on test at every granularity and match mode
"""

import argparse
import csv
import io
import logging
import time
from pathlib import Path

import numpy as np

from medread.cli import jargon_table
from medread.corpus import atomic_write_text, filter_split, load_corpus, per_source_summary
from medread.jargon import build_lexicon
from medread.metrics import JAR_BASES, UnigramProvider, format_alpha_file
from medread.pipeline import base_scores, gold_spans, jar_scores, lexicon_spans, tune_alphas
from medread.spaneval import result_rows
from medread.stats import (
    BootstrapConfig,
    gold_ratings,
    grouped_correlation,
    length_bucketed_correlation,
    quartile_boundaries,
)

log = logging.getLogger("reproduce")


def write_csv(path: Path, rows: list[dict]) -> None:
    if not rows:
        log.warning("%s: no rows", path.name)
        return
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: round(v, 4) if isinstance(v, float) else v for k, v in r.items()})
    atomic_write_text(path, buf.getvalue())


def side_gap(corpus) -> list[dict]:
    by = {}
    for s in corpus:
        if s.rating is not None:
            by.setdefault(s.source, {}).setdefault(s.side, []).append(s.rating)
    rows = []
    for src, sides in sorted(by.items()):
        if {"simple", "complex"} <= set(sides):
            simple, complex_ = float(np.mean(sides["simple"])), float(np.mean(sides["complex"]))
            rows.append({"source": src, "simple": simple, "complex": complex_, "simpler": simple < complex_})
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--corpus", required=True)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--freq", help="word<TAB>count table; enables rsrs")
    ap.add_argument("--bootstrap", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()

    corpus = load_corpus(args.corpus)
    dev, test = filter_split(corpus, "dev"), filter_split(corpus, "test")
    provider = UnigramProvider.from_tsv(args.freq) if args.freq else None
    log.info("%d sentences (%d dev, %d test)", len(corpus), len(dev), len(test))

    write_csv(args.out / "sources.csv", [r.as_row() for r in per_source_summary(corpus)])
    write_csv(args.out / "side_gap.csv", side_gap(corpus))

    spans_all = gold_spans(corpus)
    rows = [{"subset": "full", **r} for r in jargon_table(corpus, spans_all)]
    rows += [{"subset": "dev+test", **r} for r in jargon_table(filter_split(corpus, "dev", "test"), spans_all)]
    write_csv(args.out / "jargon.csv", rows)

    bases = [m for m in JAR_BASES if m != "rsrs" or provider is not None]
    alphas = tune_alphas(dev, bases, provider)
    atomic_write_text(args.out / "alphas.tsv", format_alpha_file({m: r.alpha for m, r in alphas.items()}))
    gold = gold_ratings(test)
    spans = gold_spans(test)
    boot = BootstrapConfig(args.bootstrap, 0.95, args.seed) if args.bootstrap else None
    series = {}
    for m in ["length", *bases]:
        series[m] = base_scores(test, m, provider)
        if m in alphas:
            series[f"{m}-jar"] = jar_scores(series[m], spans, alphas[m].alpha)
    readability, buckets = [], []
    bounds = quartile_boundaries(dev or test)
    for name, scores in series.items():
        values = {k: v.value for k, v in scores.items()}
        grouped = grouped_correlation(values, gold, test, "source", "pearson", boot, name)
        readability.extend(grouped.rows())
        log.info("%-9s mean r = %.3f +/- %.3f", name, grouped.mean, grouped.std)
        bucketed = length_bucketed_correlation(values, gold, test, bounds, "kendall-tau-like", boot, name)
        buckets.extend(r.as_row() for r in bucketed.results)
    write_csv(args.out / "readability.csv", readability)
    write_csv(args.out / "length_buckets.csv", buckets)

    lexicon = build_lexicon(filter_split(corpus, "train"))
    predicted = lexicon_spans(test, lexicon)
    write_csv(args.out / "span_eval.csv",
              result_rows([(s.spans, predicted[s.id], len(s.tokens)) for s in test]))
    log.info("done in %.1fs; results in %s", time.perf_counter() - start, args.out)


if __name__ == "__main__":
    main()
