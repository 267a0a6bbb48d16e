"""Annotated-sentence data model, JSONL corpus files, validation and BIO conversion."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import re
import tempfile
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .taxonomy import THREE_CLASS_LABELS, Granularity, SpanCategory, collapse

logger = logging.getLogger(__name__)

SOURCES = (
    "cochrane",
    "elife",
    "msd",
    "wiki",
    "pnas",
    "nihr-phr",
    "nihr-hta",
    "nihr-eme",
    "nihr-pgfar",
    "nihr-hsdr",
    "plos-biology",
    "plos-genetics",
    "plos-pathogens",
    "plos-compbio",
    "plos-ntd",
    "other",
)
SIDES = ("complex", "simple")
SPLITS = ("train", "dev", "test")

RATING_MIN = 0.7
RATING_MAX = 6.3
_RATING_EPS = 1e-9

FIELDS = ("id", "source", "side", "split", "tokens", "rating", "spans")


class CorpusError(ValueError):
    """Raised for malformed corpus input or invariant violations in strict mode."""


@dataclass(frozen=True, order=True)
class ComplexSpan:
    start: int
    end: int
    category: SpanCategory

    def to_dict(self) -> dict:
        return {"start": self.start, "end": self.end, "category": self.category.value}

    @classmethod
    def from_dict(cls, obj: dict) -> "ComplexSpan":
        if set(obj) != {"start", "end", "category"}:
            raise CorpusError(f"span must have exactly start/end/category, got {sorted(obj)}")
        start, end = obj["start"], obj["end"]
        if not (_is_int(start) and _is_int(end)):
            raise CorpusError("span start/end must be integers")
        try:
            category = SpanCategory(obj["category"])
        except ValueError:
            raise CorpusError(f"unknown span category {obj['category']!r}") from None
        return cls(start, end, category)


@dataclass(frozen=True)
class AnnotatedSentence:
    id: str
    source: str
    side: str
    split: str
    tokens: tuple[str, ...]
    rating: float | None = None
    spans: tuple[ComplexSpan, ...] = ()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "side": self.side,
            "split": self.split,
            "tokens": list(self.tokens),
            "rating": self.rating,
            "spans": [s.to_dict() for s in self.spans],
        }

    @classmethod
    def from_dict(cls, obj: dict, strict: bool = True) -> "AnnotatedSentence":
        missing = [f for f in FIELDS if f not in obj]
        if missing:
            raise CorpusError(f"missing fields: {', '.join(missing)}")
        extra = sorted(set(obj) - set(FIELDS))
        if extra and strict:
            raise CorpusError(f"unknown fields: {', '.join(extra)}")
        for name in ("id", "source", "side", "split"):
            if not isinstance(obj[name], str):
                raise CorpusError(f"field {name!r} must be a string")
        tokens = obj["tokens"]
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise CorpusError("field 'tokens' must be a list of strings")
        rating = obj["rating"]
        if rating is not None:
            if isinstance(rating, bool) or not isinstance(rating, (int, float)):
                raise CorpusError("field 'rating' must be a number or null")
            rating = float(rating)
        if not isinstance(obj["spans"], list):
            raise CorpusError("field 'spans' must be a list")
        spans = tuple(ComplexSpan.from_dict(s) for s in obj["spans"])
        return cls(obj["id"], obj["source"], obj["side"], obj["split"], tuple(tokens), rating, spans)


@dataclass(frozen=True)
class Violation:
    sentence_id: str
    rule: str
    message: str


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def sentence_violations(sentence: AnnotatedSentence) -> list[Violation]:
    """Per-record invariant checks (everything except cross-record id uniqueness)."""
    out: list[Violation] = []

    def add(rule: str, message: str) -> None:
        out.append(Violation(sentence.id, rule, message))

    if not sentence.id:
        add("empty-id", "id is empty")
    if sentence.source not in SOURCES:
        add("unknown-source", f"source {sentence.source!r} is not a canonical source id")
    if sentence.side not in SIDES:
        add("bad-side", f"side {sentence.side!r} not in {SIDES}")
    if sentence.split not in SPLITS:
        add("bad-split", f"split {sentence.split!r} not in {SPLITS}")
    if not sentence.tokens:
        add("empty-tokens", "tokens is empty")
    for i, tok in enumerate(sentence.tokens):
        if not tok or any(ch.isspace() for ch in tok):
            add("bad-token", f"token {i} is empty or contains whitespace")
    if sentence.rating is not None:
        r = sentence.rating
        if not math.isfinite(r) or r < RATING_MIN - _RATING_EPS or r > RATING_MAX + _RATING_EPS:
            add("rating-range", f"rating {r} outside [{RATING_MIN}, {RATING_MAX}]")
    n = len(sentence.tokens)
    prev: ComplexSpan | None = None
    for span in sentence.spans:
        if not span.start < span.end:
            add("span-bounds", f"start < end violated for span ({span.start}, {span.end})")
        elif span.start < 0 or span.end > n:
            add("span-bounds", f"span ({span.start}, {span.end}) outside [0, {n}]")
        if prev is not None:
            if span.start < prev.start:
                add("span-order", f"span ({span.start}, {span.end}) not sorted by start")
            elif span.start < prev.end:
                add(
                    "span-overlap",
                    f"spans ({prev.start}, {prev.end}) and ({span.start}, {span.end}) overlap",
                )
        prev = span
    return out


def validate(corpus: Iterable[AnnotatedSentence]) -> list[Violation]:
    violations: list[Violation] = []
    seen: set[str] = set()
    for sentence in corpus:
        violations.extend(sentence_violations(sentence))
        if sentence.id in seen:
            violations.append(Violation(sentence.id, "duplicate-id", f"id {sentence.id!r} repeated"))
        seen.add(sentence.id)
    return violations


def read_corpus(path: str | os.PathLike, strict: bool = True) -> tuple[list[AnnotatedSentence], list[Violation]]:
    """Read a JSONL corpus, returning the accepted records and what was skipped.

    In strict mode the first malformed line or invariant violation raises
    ``CorpusError``. In lenient mode offending records are dropped and their
    violations returned; a line that is not valid JSON is still fatal.
    """
    corpus: list[AnnotatedSentence] = []
    skipped: list[Violation] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise CorpusError(f"line {lineno}: expected a JSON object")
            try:
                sentence = AnnotatedSentence.from_dict(obj, strict=strict)
            except CorpusError as exc:
                if strict:
                    raise CorpusError(f"line {lineno}: {exc}") from None
                skipped.append(Violation(str(obj.get("id", f"line-{lineno}")), "malformed", str(exc)))
                continue
            problems = sentence_violations(sentence)
            if sentence.id in seen:
                problems.append(Violation(sentence.id, "duplicate-id", f"id {sentence.id!r} repeated"))
            if problems:
                if strict:
                    first = problems[0]
                    raise CorpusError(f"line {lineno}: {first.sentence_id}: {first.message}")
                skipped.extend(problems)
                continue
            seen.add(sentence.id)
            corpus.append(sentence)
    return corpus, skipped


def load_corpus(path: str | os.PathLike, strict: bool = True) -> list[AnnotatedSentence]:
    corpus, skipped = read_corpus(path, strict=strict)
    for v in skipped:
        logger.warning("skipped %s: %s (%s)", v.sentence_id, v.message, v.rule)
    return corpus


def dumps_sentence(sentence: AnnotatedSentence) -> str:
    return json.dumps(sentence.to_dict(), ensure_ascii=False)


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_corpus(corpus: Iterable[AnnotatedSentence], path: str | os.PathLike) -> None:
    atomic_write_text(path, "".join(dumps_sentence(s) + "\n" for s in corpus))


def load_split_tsv(path: str | os.PathLike) -> dict[str, str]:
    """Read a two-column ``id<TAB>split`` file."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise CorpusError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            sid, split = row[0].strip(), row[1].strip()
            if split not in SPLITS:
                raise CorpusError(f"{path}:{lineno}: unknown split {split!r}")
            mapping[sid] = split
    return mapping


def apply_splits(corpus: Sequence[AnnotatedSentence], splits: dict[str, str]) -> list[AnnotatedSentence]:
    return [replace(s, split=splits[s.id]) if s.id in splits else s for s in corpus]


def filter_split(corpus: Iterable[AnnotatedSentence], *splits: str) -> list[AnnotatedSentence]:
    if not splits or splits == ("all",):
        return list(corpus)
    return [s for s in corpus if s.split in splits]


_CEFR = re.compile(r"^\s*([1-6])\s*([+-]?)\s*$")


def cefr_to_number(level: str | int | float) -> float:
    """Convert a CEFR-style level ("3", "3+", "3-") to its numeric score.

    A trailing "+" adds 0.3 and "-" subtracts 0.3; numbers pass through.
    """
    if isinstance(level, (int, float)) and not isinstance(level, bool):
        return float(level)
    m = _CEFR.match(str(level))
    if not m:
        raise ValueError(f"not a CEFR level: {level!r}")
    value = float(m.group(1))
    return value + {"+": 0.3, "-": -0.3, "": 0.0}[m.group(2)]


# --- BIO -------------------------------------------------------------------

OUTSIDE = "O"


def bio_label_set() -> tuple[str, ...]:
    return (OUTSIDE,) + tuple(f"{p}-{c.value}" for c in SpanCategory for p in "BI")


def to_bio(sentence: AnnotatedSentence) -> list[str]:
    problems = [v for v in sentence_violations(sentence) if v.rule.startswith("span") or v.rule == "empty-tokens"]
    if problems:
        raise CorpusError(f"{sentence.id}: {problems[0].message}")
    labels = [OUTSIDE] * len(sentence.tokens)
    for span in sentence.spans:
        labels[span.start] = f"B-{span.category.value}"
        for i in range(span.start + 1, span.end):
            labels[i] = f"I-{span.category.value}"
    return labels


class BioDecoding(NamedTuple):
    spans: list[ComplexSpan]
    repairs: list[str]


def _parse_label(label: str) -> tuple[str, SpanCategory | None]:
    if label == OUTSIDE:
        return OUTSIDE, None
    prefix, _, cat = label.partition("-")
    if prefix not in ("B", "I") or not cat:
        raise ValueError(f"unknown label {label!r}")
    try:
        return prefix, SpanCategory(cat)
    except ValueError:
        raise ValueError(f"unknown label {label!r}") from None


def from_bio(tokens: Sequence[str], labels: Sequence[str]) -> BioDecoding:
    """Decode BIO labels into spans.

    An ``I-c`` that does not continue a span of category ``c`` opens a new
    span; each such repair is described in ``repairs``.
    """
    if len(tokens) != len(labels):
        raise ValueError(f"length mismatch: {len(tokens)} tokens, {len(labels)} labels")
    spans: list[ComplexSpan] = []
    repairs: list[str] = []
    start: int | None = None
    current: SpanCategory | None = None

    def close(end: int) -> None:
        if start is not None:
            spans.append(ComplexSpan(start, end, current))

    for i, label in enumerate(labels):
        prefix, cat = _parse_label(label)
        if prefix == OUTSIDE:
            close(i)
            start, current = None, None
        elif prefix == "B":
            close(i)
            start, current = i, cat
        elif start is None or cat is not current:
            close(i)
            repairs.append(f"token {i}: {label} does not continue a {cat.value} span; opened a new span")
            start, current = i, cat
    close(len(labels))
    return BioDecoding(spans, repairs)


# --- per-source summary -----------------------------------------------------


@dataclass
class SourceSummary:
    source: str
    side: str
    n: int
    mean_rating: float
    q1: float
    median: float
    q3: float
    mean_spans: dict[str, float] = field(default_factory=dict)

    def as_row(self) -> dict:
        row = {
            "source": self.source,
            "side": self.side,
            "n": self.n,
            "mean_rating": self.mean_rating,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
        }
        row.update({f"mean_spans_{label}": v for label, v in self.mean_spans.items()})
        return row


def per_source_summary(corpus: Iterable[AnnotatedSentence]) -> list[SourceSummary]:
    """Rating distribution and mean 3-class span counts per (source, side)."""
    groups: dict[tuple[str, str], list[AnnotatedSentence]] = defaultdict(list)
    for s in corpus:
        if s.rating is not None:
            groups[(s.source, s.side)].append(s)
    rows = []
    for (source, side), members in sorted(groups.items(), key=lambda kv: (_source_rank(kv[0][0]), kv[0][1])):
        ratings = np.array([s.rating for s in members], dtype=float)
        q1, median, q3 = np.percentile(ratings, [25, 50, 75])
        counts = {label: 0 for label in THREE_CLASS_LABELS}
        for s in members:
            for span in s.spans:
                counts[collapse(span.category, Granularity.THREE_CLASS)] += 1
        rows.append(
            SourceSummary(
                source=source,
                side=side,
                n=len(members),
                mean_rating=float(ratings.mean()),
                q1=float(q1),
                median=float(median),
                q3=float(q3),
                mean_spans={label: c / len(members) for label, c in counts.items()},
            )
        )
    return rows


def _source_rank(source: str) -> tuple[int, str]:
    return (SOURCES.index(source) if source in SOURCES else len(SOURCES), source)
