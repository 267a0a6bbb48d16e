"""Corpus-level glue: scoring every sentence, choosing span sources, tuning weights."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Iterable, Mapping, Sequence

from .analyzers import NoWordsError
from .corpus import AnnotatedSentence, ComplexSpan, filter_split
from .jargon import Lexicon, build_lexicon, load_external_predictions, tag
from .metrics import (
    DEFAULT_GRID,
    JAR_BASES,
    AlphaSearch,
    MetricScore,
    SurprisalProvider,
    jar_variant,
    score,
    search_alpha,
)
from .taxonomy import MEDICAL, Granularity, collapse

logger = logging.getLogger(__name__)

SpanMap = Mapping[str, Sequence[ComplexSpan]]


def _score_one(sentence: AnnotatedSentence, metric: str, provider: SurprisalProvider | None):
    try:
        return sentence.id, score(metric, sentence.tokens, provider)
    except NoWordsError:
        return sentence.id, None


def base_scores(
    corpus: Iterable[AnnotatedSentence],
    metric: str,
    provider: SurprisalProvider | None = None,
    jobs: int = 1,
) -> dict[str, MetricScore]:
    """Score sentences with a base metric; sentences without words are left out."""
    corpus = list(corpus)
    fn = partial(_score_one, metric=metric, provider=provider)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(fn, corpus, chunksize=max(1, len(corpus) // (4 * jobs))))
    else:
        pairs = [fn(s) for s in corpus]
    out = {}
    for sid, result in pairs:
        if result is None:
            logger.warning("%s: no word tokens, not scored", sid)
        else:
            out[sid] = result
    return dict(sorted(out.items()))


def jargon_count(spans: Sequence[ComplexSpan], count: str = "binary") -> int:
    """Number of spans entering a -Jar formula: all of them, or medical jargon only."""
    if count == "binary":
        return len(spans)
    if count == "medical":
        return sum(1 for s in spans if collapse(s.category, Granularity.THREE_CLASS) == MEDICAL)
    raise ValueError(f"unknown jargon count mode {count!r}")


def jar_scores(
    base: Mapping[str, MetricScore], spans: SpanMap, alpha: float, count: str = "binary"
) -> dict[str, MetricScore]:
    return {sid: jar_variant(ms, jargon_count(spans[sid], count), alpha) for sid, ms in base.items()}


def gold_spans(corpus: Iterable[AnnotatedSentence]) -> dict[str, list[ComplexSpan]]:
    return {s.id: list(s.spans) for s in corpus}


def lexicon_spans(
    corpus: Iterable[AnnotatedSentence], lexicon: Lexicon, common_words: frozenset[str] = frozenset()
) -> dict[str, list[ComplexSpan]]:
    return {s.id: tag(s.tokens, lexicon, common_words) for s in corpus}


def resolve_spans(
    source: str,
    corpus: Sequence[AnnotatedSentence],
    full_corpus: Sequence[AnnotatedSentence] | None = None,
    lexicon: Lexicon | None = None,
    common_words: frozenset[str] = frozenset(),
    min_count: int = 1,
) -> dict[str, list[ComplexSpan]]:
    """Spans per sentence from ``gold``, ``lexicon`` or ``file=PATH``.

    Without an explicit lexicon, one is built from the train split of
    ``full_corpus``.
    """
    if source == "gold":
        return gold_spans(corpus)
    if source == "lexicon":
        if lexicon is None:
            lexicon = build_lexicon(filter_split(full_corpus or corpus, "train"), min_count)
        return lexicon_spans(corpus, lexicon, common_words)
    if source.startswith("file="):
        return load_external_predictions(source[len("file="):], corpus)
    raise ValueError(f"unknown jargon source {source!r}")


def tune_alphas(
    dev: Sequence[AnnotatedSentence],
    metrics: Sequence[str] = JAR_BASES,
    provider: SurprisalProvider | None = None,
    spans: SpanMap | None = None,
    grid: tuple[float, float, float] = DEFAULT_GRID,
    count: str = "binary",
) -> dict[str, AlphaSearch]:
    """Grid-search one jargon weight per base metric on rated ``dev`` sentences."""
    spans = gold_spans(dev) if spans is None else spans
    rated = [s for s in dev if s.rating is not None]
    out = {}
    for metric in metrics:
        base = base_scores(rated, metric, provider)
        triples = [(base[s.id].value, jargon_count(spans[s.id], count), s.rating) for s in rated if s.id in base]
        out[metric] = search_alpha(triples, metric, grid)
    return out
