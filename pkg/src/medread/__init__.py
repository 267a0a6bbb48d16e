"""Sentence readability and complex-span measurement for medical text."""

from .analyzers import SentenceStats, count_syllables, sentence_stats, word_chars
from .corpus import AnnotatedSentence, ComplexSpan, from_bio, load_corpus, save_corpus, to_bio, validate
from .metrics import MetricScore, UnigramProvider, ari, fkgl, jar_variant, rsrs, smog, tune_alpha
from .taxonomy import Granularity, SpanCategory, collapse

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSentence",
    "ComplexSpan",
    "Granularity",
    "MetricScore",
    "SentenceStats",
    "SpanCategory",
    "UnigramProvider",
    "ari",
    "collapse",
    "count_syllables",
    "fkgl",
    "from_bio",
    "jar_variant",
    "load_corpus",
    "rsrs",
    "save_corpus",
    "sentence_stats",
    "smog",
    "to_bio",
    "tune_alpha",
    "validate",
    "word_chars",
]
