import csv
import json

import pytest

from medread.corpus import ComplexSpan, CorpusError
from medread.ingest import convert_record, ingest, normalize_category
from medread.taxonomy import SpanCategory as C


def test_normalize_category():
    assert normalize_category("Google Easy") is C.GOOGLE_EASY
    assert normalize_category("abbr_medical") is C.MEDICAL_ABBREVIATION
    assert normalize_category("x", {"x": "multi-sense"}) is C.MULTI_SENSE
    with pytest.raises(CorpusError):
        normalize_category("jargon")


def test_convert_token_offsets_inclusive():
    mapping = {
        "fields": {"id": "sid", "source": "resource", "side": "version", "rating": ["r1", "r2"],
                   "spans": "entities"},
        "span_fields": {"category": "label"},
        "span_end": "inclusive",
        "source_map": {"Cochrane": "cochrane"},
        "side_map": {"original": "complex"},
    }
    record = {"sid": 7, "resource": "Cochrane", "version": "original", "tokens": ["LTFU", "was", "high"],
              "r1": "3+", "r2": 3.7, "entities": [{"start": 0, "end": 0, "label": "medical-abbreviation"}]}
    s = convert_record(record, mapping)
    assert (s.id, s.source, s.side, s.split) == ("7", "cochrane", "complex", "train")
    assert s.rating == pytest.approx(3.5)
    assert s.spans == (ComplexSpan(0, 1, C.MEDICAL_ABBREVIATION),)


def test_convert_char_offsets():
    mapping = {"span_offsets": "char"}
    record = {"id": "a", "text": "Tumour necrosis factor rose", "spans": [[7, 22, "google-hard"]]}
    s = convert_record(record, mapping)
    assert s.tokens == ("Tumour", "necrosis", "factor", "rose")
    assert s.spans == (ComplexSpan(1, 3, C.GOOGLE_HARD),)


def test_ingest_csv_and_errors(tmp_path):
    path = tmp_path / "in.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "text", "rating", "spans"])
        w.writerow(["a", "A short one .", "2", json.dumps([[0, 1, "general-complex"]])])
        w.writerow(["b", "Another .", "", "[]"])
    corpus = ingest(path, {"format": "csv"})
    assert [s.id for s in corpus] == ["a", "b"]
    assert corpus[1].rating is None
    with pytest.raises(CorpusError, match="record 1"):
        ingest(path, {"format": "csv", "fields": {"id": "missing"}})
