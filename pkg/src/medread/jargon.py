"""Complex-span tagging with a surface lexicon, span counting and prediction ingestion."""

from __future__ import annotations

import csv
import json
import os
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import AnnotatedSentence, ComplexSpan, CorpusError, from_bio
from .taxonomy import TIE_BREAK_ORDER, Granularity, SpanCategory, collapse, labels_for

ALL = "all"

_ABBREVIATION = re.compile(r"^[A-Z]{2,6}$")


@dataclass(frozen=True)
class Lexicon:
    entries: Mapping[tuple[str, ...], SpanCategory]
    max_entry_len: int

    @classmethod
    def from_entries(cls, entries: Mapping[tuple[str, ...], SpanCategory]) -> "Lexicon":
        clean = {}
        for key, cat in entries.items():
            key = tuple(t.casefold() for t in key)
            if not key or any(not t for t in key):
                raise ValueError("empty lexicon key")
            clean[key] = SpanCategory(cat)
        return cls(clean, max((len(k) for k in clean), default=0))

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, tokens: Sequence[str]) -> SpanCategory | None:
        return self.entries.get(tuple(t.casefold() for t in tokens))


def build_lexicon(train: Iterable[AnnotatedSentence], min_count: int = 1) -> Lexicon:
    """Collect gold span surfaces; each surface takes its majority category."""
    seen: dict[tuple[str, ...], Counter] = defaultdict(Counter)
    n_sentences = 0
    for sentence in train:
        n_sentences += 1
        for span in sentence.spans:
            surface = tuple(t.casefold() for t in sentence.tokens[span.start : span.end])
            seen[surface][span.category] += 1
    if n_sentences == 0:
        raise ValueError("empty training corpus")
    entries = {}
    for surface, cats in seen.items():
        if sum(cats.values()) < min_count:
            continue
        entries[surface] = min(cats, key=lambda c: (-cats[c], TIE_BREAK_ORDER.index(c)))
    return Lexicon.from_entries(entries)


def load_lexicon(path: str | os.PathLike) -> Lexicon:
    entries = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE), 1):
            if not row or not row[0].strip():
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected surface<TAB>category")
            try:
                entries[tuple(row[0].split())] = SpanCategory(row[1].strip())
            except ValueError:
                raise ValueError(f"{path}:{lineno}: unknown category {row[1]!r}") from None
    return Lexicon.from_entries(entries)


def format_lexicon(lexicon: Lexicon) -> str:
    return "".join(f"{' '.join(k)}\t{v.value}\n" for k, v in sorted(lexicon.entries.items()))


def load_word_list(path: str | os.PathLike) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().casefold() for line in fh if line.strip())


def tag(
    tokens: Sequence[str],
    lexicon: Lexicon,
    common_words: frozenset[str] = frozenset(),
    abbreviations: bool = True,
) -> list[ComplexSpan]:
    """Greedy leftmost-longest lexicon match, then an all-caps abbreviation pass."""
    folded = [t.casefold() for t in tokens]
    spans = []
    covered = [False] * len(tokens)
    i = 0
    while i < len(tokens):
        for length in range(min(lexicon.max_entry_len, len(tokens) - i), 0, -1):
            cat = lexicon.entries.get(tuple(folded[i : i + length]))
            if cat is not None:
                spans.append(ComplexSpan(i, i + length, cat))
                covered[i : i + length] = [True] * length
                i += length
                break
        else:
            i += 1
    if abbreviations:
        for i, tok in enumerate(tokens):
            if not covered[i] and _ABBREVIATION.match(tok) and folded[i] not in common_words:
                spans.append(ComplexSpan(i, i + 1, SpanCategory.MEDICAL_ABBREVIATION))
        spans.sort()
    return spans


@dataclass(frozen=True)
class JargonCounts:
    n_spans: int
    n_tokens: int
    pct_tokens: float


def count_jargon(
    spans: Sequence[ComplexSpan],
    tokens: Sequence[str],
    granularity: Granularity = Granularity.THREE_CLASS,
) -> dict[str, JargonCounts]:
    """Span count, covered-token count and covered fraction per label and overall.

    The fraction is relative to the sentence's token count; keys are the
    collapsed labels plus ``"all"``.
    """
    n_spans = {label: 0 for label in labels_for(granularity)}
    n_tokens = dict.fromkeys(n_spans, 0)
    for span in spans:
        label = collapse(span.category, granularity)
        n_spans[label] += 1
        n_tokens[label] += span.end - span.start
    n_spans[ALL] = sum(n_spans.values())
    n_tokens[ALL] = sum(n_tokens.values())
    denom = len(tokens)
    return {
        label: JargonCounts(n_spans[label], n_tokens[label], n_tokens[label] / denom if denom else 0.0)
        for label in n_spans
    }


def load_external_predictions(
    path: str | os.PathLike, corpus: Sequence[AnnotatedSentence]
) -> dict[str, list[ComplexSpan]]:
    """Read predicted spans from JSONL lines ``{"id", "labels"}`` or ``{"id", "spans"}``.

    Sentences of ``corpus`` missing from the file get no spans.
    """
    by_id = {s.id: s for s in corpus}
    predictions: dict[str, list[ComplexSpan]] = {s.id: [] for s in corpus}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            sid = obj.get("id")
            if sid not in by_id:
                raise CorpusError(f"{path}:{lineno}: unknown sentence id {sid!r}")
            tokens = by_id[sid].tokens
            if "labels" in obj:
                labels = obj["labels"]
                if len(labels) != len(tokens):
                    raise CorpusError(
                        f"{sid}: {len(labels)} labels for {len(tokens)} tokens"
                    )
                try:
                    spans = from_bio(tokens, labels).spans
                except ValueError as exc:
                    raise CorpusError(f"{sid}: {exc}") from None
            elif "spans" in obj:
                spans = sorted(ComplexSpan.from_dict(s) for s in obj["spans"])
                for a, b in zip(spans, spans[1:]):
                    if b.start < a.end:
                        raise CorpusError(f"{sid}: overlapping predicted spans")
                for s in spans:
                    if not 0 <= s.start < s.end <= len(tokens):
                        raise CorpusError(f"{sid}: span ({s.start}, {s.end}) out of bounds")
            else:
                raise CorpusError(f"{path}:{lineno}: needs 'labels' or 'spans'")
            predictions[sid] = list(spans)
    return predictions


def format_predictions(predictions: Mapping[str, Sequence[ComplexSpan]]) -> str:
    return "".join(
        json.dumps({"id": sid, "spans": [s.to_dict() for s in spans]}, ensure_ascii=False) + "\n"
        for sid, spans in sorted(predictions.items())
    )
