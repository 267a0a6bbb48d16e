"""Convert an externally formatted release into the canonical JSONL corpus.

The mapping is a JSON object::

    {
      "format": "jsonl",                # jsonl | json | csv
      "fields": {"id": "sid", "source": "resource", "side": "version",
                 "split": "split", "tokens": "tokens", "text": "sentence",
                 "rating": ["rating_1", "rating_2"], "spans": "entities"},
      "span_fields": {"start": "start", "end": "end", "category": "label"},
      "span_offsets": "token",          # token | char (char offsets into "text")
      "span_end": "exclusive",          # exclusive | inclusive
      "source_map": {"Cochrane": "cochrane"},
      "side_map": {"original": "complex", "simplified": "simple"},
      "category_map": {"jargon-easy": "google-easy"},
      "defaults": {"split": "train"}
    }

Only ``fields.id`` and one of ``fields.tokens`` / ``fields.text`` are
required. A list for ``rating`` averages the non-null entries; rating strings
such as ``"3+"`` are read as CEFR levels.
"""

from __future__ import annotations

import csv
import json
import os
import re
from typing import Any, Iterator, Mapping

from .corpus import AnnotatedSentence, ComplexSpan, CorpusError, cefr_to_number
from .taxonomy import SpanCategory

_CATEGORY_ALIASES = {
    "name-entity": SpanCategory.MEDICAL_NAME_ENTITY,
    "named-entity": SpanCategory.MEDICAL_NAME_ENTITY,
    "medical-jargon-name-entity": SpanCategory.MEDICAL_NAME_ENTITY,
    "multisense": SpanCategory.MULTI_SENSE,
    "abbreviation-medical": SpanCategory.MEDICAL_ABBREVIATION,
    "medical-domain-abbreviation": SpanCategory.MEDICAL_ABBREVIATION,
    "abbr-medical": SpanCategory.MEDICAL_ABBREVIATION,
    "abbreviation-general": SpanCategory.GENERAL_ABBREVIATION,
    "general-domain-abbreviation": SpanCategory.GENERAL_ABBREVIATION,
    "abbr-general": SpanCategory.GENERAL_ABBREVIATION,
    "medical-jargon-google-easy": SpanCategory.GOOGLE_EASY,
    "medical-jargon-google-hard": SpanCategory.GOOGLE_HARD,
}


def normalize_category(raw: str, extra: Mapping[str, str] | None = None) -> SpanCategory:
    if extra and raw in extra:
        return SpanCategory(extra[raw])
    key = re.sub(r"[\s_/]+", "-", str(raw).strip().casefold())
    try:
        return SpanCategory(key)
    except ValueError:
        pass
    if key in _CATEGORY_ALIASES:
        return _CATEGORY_ALIASES[key]
    raise CorpusError(f"unknown span category {raw!r}")


def _records(path: str | os.PathLike, fmt: str) -> Iterator[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        if fmt == "jsonl":
            for lineno, line in enumerate(fh, 1):
                if line.strip():
                    try:
                        yield json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise CorpusError(f"line {lineno}: malformed JSON ({exc.msg})") from None
        elif fmt == "json":
            data = json.load(fh)
            yield from (data.values() if isinstance(data, dict) else data)
        elif fmt == "csv":
            yield from csv.DictReader(fh)
        else:
            raise ValueError(f"unknown input format {fmt!r}")


def _get(record: Mapping[str, Any], key: str | list | None) -> Any:
    if key is None:
        return None
    if isinstance(key, list):
        return [_get(record, k) for k in key]
    value: Any = record
    for part in key.split("."):
        if not isinstance(value, Mapping) or part not in value:
            return None
        value = value[part]
    return value


def _rating(value: Any) -> float | None:
    if value is None or value == "":
        return None
    if isinstance(value, list):
        vals = [_rating(v) for v in value]
        vals = [v for v in vals if v is not None]
        return sum(vals) / len(vals) if vals else None
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return cefr_to_number(value)
    return float(value)


def _char_to_token(text: str, tokens: list[str], start: int, end: int) -> tuple[int, int]:
    offsets = []
    pos = 0
    for tok in tokens:
        pos = text.index(tok, pos)
        offsets.append((pos, pos + len(tok)))
        pos += len(tok)
    covered = [i for i, (a, b) in enumerate(offsets) if a < end and b > start]
    if not covered:
        raise CorpusError(f"character span ({start}, {end}) covers no token")
    return covered[0], covered[-1] + 1


def convert_record(record: Mapping[str, Any], mapping: Mapping[str, Any]) -> AnnotatedSentence:
    fields = mapping.get("fields", {})
    defaults = mapping.get("defaults", {})

    def field(name: str) -> Any:
        value = _get(record, fields.get(name, name))
        return defaults.get(name) if value is None else value

    sid = field("id")
    if sid is None:
        raise CorpusError("record without id")
    text = field("text")
    tokens = field("tokens")
    if tokens is None:
        if text is None:
            raise CorpusError(f"{sid}: neither tokens nor text")
        tokens = str(text).split()
    elif isinstance(tokens, str):
        tokens = tokens.split()
    tokens = [str(t) for t in tokens]

    source = str(field("source") or "other")
    source = mapping.get("source_map", {}).get(source, source)
    side = str(field("side") or "complex")
    side = mapping.get("side_map", {}).get(side, side)
    split = str(field("split") or "train")

    span_fields = {"start": "start", "end": "end", "category": "category", **mapping.get("span_fields", {})}
    by_char = mapping.get("span_offsets", "token") == "char"
    inclusive = mapping.get("span_end", "exclusive") == "inclusive"
    raw_spans = field("spans") or []
    if isinstance(raw_spans, str):
        raw_spans = json.loads(raw_spans)
    spans = []
    for raw in raw_spans:
        if isinstance(raw, (list, tuple)):
            start, end, cat = raw[0], raw[1], raw[2]
        else:
            start, end, cat = raw[span_fields["start"]], raw[span_fields["end"]], raw[span_fields["category"]]
        start, end = int(start), int(end) + (1 if inclusive else 0)
        if by_char:
            start, end = _char_to_token(str(text) if text is not None else " ".join(tokens), tokens, start, end)
        spans.append(ComplexSpan(start, end, normalize_category(cat, mapping.get("category_map"))))
    spans.sort()
    return AnnotatedSentence(str(sid), source, side, split, tuple(tokens), _rating(field("rating")), tuple(spans))


def ingest(path: str | os.PathLike, mapping: Mapping[str, Any]) -> list[AnnotatedSentence]:
    out = []
    for n, record in enumerate(_records(path, mapping.get("format", "jsonl")), 1):
        try:
            out.append(convert_record(record, mapping))
        except (CorpusError, KeyError, ValueError, IndexError) as exc:
            raise CorpusError(f"record {n}: {exc}") from None
    return out
