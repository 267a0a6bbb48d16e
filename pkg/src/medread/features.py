"""A resource-table subset of sentence-level linguistic features."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .analyzers import sentence_stats, words_of
from .corpus import AnnotatedSentence, ComplexSpan
from .jargon import ALL, count_jargon
from .taxonomy import THREE_CLASS_LABELS, Granularity

AOA_FILE = "aoa.tsv"
ZIPF_FILE = "zipf.tsv"
COMMON_FILE = "common2000.txt"

_JARGON_LABELS = THREE_CLASS_LABELS + (ALL,)


def _suffix(label: str) -> str:
    return label.replace("+", "_")


JARGON_FEATURES = tuple(
    f"{kind}_{_suffix(label)}"
    for label in _JARGON_LABELS
    for kind in ("jargon_spans", "jargon_tokens", "jargon_token_pct")
)

FEATURE_IDS = (
    "t_word",
    "t_uword",
    "t_char",
    "t_syll",
    "t_syll2",
    "t_syll3",
    "avg_chars_per_token",
    "corr_ttr",
    "aoa_max",
    "aoa_total",
    "aoa_avg",
    "zipf_total",
    "n_soph_word_tokens",
    "n_soph_word_types",
) + JARGON_FEATURES


@dataclass(frozen=True)
class ResourceTables:
    aoa: Mapping[str, float]
    zipf: Mapping[str, float]
    common2000: frozenset[str]


def _read_table(path: Path) -> dict[str, float]:
    table = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE), 1):
            if not row or not row[0].strip():
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected word<TAB>value")
            try:
                value = float(row[1])
            except ValueError:
                if lineno == 1:  # header row
                    continue
                raise ValueError(f"{path}:{lineno}: bad number {row[1]!r}") from None
            table[row[0].strip().casefold()] = value
    return table


def load_resources(directory: str | os.PathLike) -> ResourceTables:
    """Load ``aoa.tsv``, ``zipf.tsv`` and ``common2000.txt`` from ``directory``."""
    directory = Path(directory)
    missing = [f for f in (AOA_FILE, ZIPF_FILE, COMMON_FILE) if not (directory / f).is_file()]
    if missing:
        raise FileNotFoundError(f"{directory}: missing resource files {', '.join(missing)}")
    with open(directory / COMMON_FILE, encoding="utf-8") as fh:
        common = frozenset(line.strip().casefold() for line in fh if line.strip())
    return ResourceTables(_read_table(directory / AOA_FILE), _read_table(directory / ZIPF_FILE), common)


def extract(
    sentence: AnnotatedSentence, resources: ResourceTables, spans: Sequence[ComplexSpan] | None = None
) -> dict[str, float]:
    """Feature vector for one sentence; ``spans`` defaults to the gold spans."""
    if resources is None:
        raise ValueError("resources not loaded")
    stats = sentence_stats(sentence.tokens)
    words = [w.casefold() for w in words_of(sentence.tokens)]
    aoa = [resources.aoa[w] for w in words if w in resources.aoa]
    soph = [w for w in words if w not in resources.common2000]
    f: dict[str, float] = {
        "t_word": stats.n_words,
        "t_uword": stats.n_unique_words,
        "t_char": stats.n_chars,
        "t_syll": stats.n_syllables,
        "t_syll2": stats.n_syll2,
        "t_syll3": sum(1 for s in stats.per_word_syllables if s > 3),
        "avg_chars_per_token": stats.n_chars / stats.n_words,
        "corr_ttr": stats.n_unique_words / math.sqrt(2 * stats.n_words),
        "aoa_max": max(aoa, default=0.0),
        "aoa_total": sum(aoa),
        "aoa_avg": sum(aoa) / len(aoa) if aoa else 0.0,
        "zipf_total": sum(resources.zipf[w] for w in words if w in resources.zipf),
        "n_soph_word_tokens": len(soph),
        "n_soph_word_types": len(set(soph)),
    }
    counts = count_jargon(sentence.spans if spans is None else spans, sentence.tokens, Granularity.THREE_CLASS)
    for label in _JARGON_LABELS:
        c = counts[label]
        f[f"jargon_spans_{_suffix(label)}"] = c.n_spans
        f[f"jargon_tokens_{_suffix(label)}"] = c.n_tokens
        f[f"jargon_token_pct_{_suffix(label)}"] = c.pct_tokens
    return f


def features_csv(rows: Mapping[str, Mapping[str, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("id",) + FEATURE_IDS)
    for sid in sorted(rows):
        writer.writerow([sid] + [_fmt(rows[sid][k]) for k in FEATURE_IDS])
    return buf.getvalue()


def _fmt(value: float) -> str:
    return str(value) if isinstance(value, int) else f"{value:.6g}"
