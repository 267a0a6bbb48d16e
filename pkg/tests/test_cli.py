import csv
import io
import json
import os

import pytest

from medread.cli import run
from medread.corpus import AnnotatedSentence, save_corpus
from medread.synthetic import frequency_table


@pytest.fixture
def small_corpus(tmp_path, synth_corpus):
    path = tmp_path / "small.jsonl"
    save_corpus(synth_corpus[:300], path)
    return path


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_validate_ok(small_corpus, capsys):
    assert run(["validate", "--corpus", str(small_corpus)]) == 0
    assert "0 violations" in capsys.readouterr().out


def test_validate_bad(tmp_path, capsys):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps({"id": "x", "source": "msd", "side": "simple", "split": "dev",
                                "tokens": ["a"], "rating": 9.0, "spans": []}) + "\n", encoding="utf-8")
    assert run(["validate", "--corpus", str(path)]) == 2
    assert "1 violations" in capsys.readouterr().out


def test_exit_codes(tmp_path, small_corpus):
    assert run([]) == 1
    assert run(["score", "--corpus", str(small_corpus), "--metric", "flesch"]) == 1
    assert run(["score", "--corpus", str(tmp_path / "missing.jsonl")]) == 3
    assert run(["score", "--corpus", str(small_corpus), "--metric", "rsrs"]) == 1
    assert run(["--help"]) == 0


def test_smog_zero_polysyllables(tmp_path, capsys):
    path = tmp_path / "c.jsonl"
    save_corpus([AnnotatedSentence("s1", "msd", "simple", "test", ("The", "cat", "sat", "."), 1.5, ())], path)
    assert run(["score", "--corpus", str(path), "--metric", "smog"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["value"]) == pytest.approx(3.1291)
    assert row["n_polysyllables"] == "0"


def test_score_deterministic_and_atomic(tmp_path, small_corpus):
    freq = tmp_path / "freq.tsv"
    freq.write_text("".join(f"{w}\t{c}\n" for w, c in frequency_table().items()), encoding="utf-8")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["score", "--corpus", str(small_corpus), "--metric", "all", "--freq", str(freq), "--grid", "0:10:0.5"]
    assert run(args + ["--out", str(out1)]) == 0
    assert run(args + ["--out", str(out2), "--jobs", "2"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    metrics = {r["metric"] for r in rows(out1.read_text())}
    assert metrics == {"length", "fkgl", "ari", "smog", "rsrs", "fkgl-jar", "ari-jar", "smog-jar", "rsrs-jar"}
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".") or p.endswith(".tmp")]


def test_tune_then_score_with_alpha_file(tmp_path, small_corpus, capsys):
    alpha = tmp_path / "alpha.tsv"
    assert run(["tune-alpha", "--corpus", str(small_corpus), "--split", "dev", "--grid", "0:10:0.5",
                "--out", str(alpha)]) == 0
    assert {line.split("\t")[0] for line in alpha.read_text().splitlines()} == {"fkgl", "ari", "smog"}
    assert run(["score", "--corpus", str(small_corpus), "--split", "test", "--metric", "fkgl-jar",
                "--alpha-file", str(alpha)]) == 0
    out = rows(capsys.readouterr().out)
    assert out and all(r["metric"] == "fkgl-jar" and r["split"] == "test" for r in out)


def test_eval_spans_and_tag(tmp_path, small_corpus, capsys):
    assert run(["eval-spans", "--corpus", str(small_corpus), "--jargon", "gold"]) == 1
    pred = tmp_path / "pred.jsonl"
    assert run(["tag", "--corpus", str(small_corpus), "--split", "test", "--out", str(pred)]) == 0
    assert run(["eval-spans", "--corpus", str(small_corpus), "--split", "test",
                "--jargon", f"file={pred}", "--granularity", "binary", "--match", "token"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert row["granularity"] == "binary"
    assert 0 <= float(row["f1"]) <= 1


def test_eval_readability(tmp_path, small_corpus, capsys):
    assert run(["eval-readability", "--corpus", str(small_corpus), "--split", "test",
                "--metric", "fkgl", "--bootstrap", "200", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out[-2]["group"] == "Mean" and out[-1]["group"] == "Std"
    first = out[0]
    assert first["ci_low"] <= first["r"] <= first["ci_high"]
    assert run(["eval-readability", "--corpus", str(small_corpus), "--metric", "length",
                "--length-buckets", "quartiles"]) == 0
    assert len(rows(capsys.readouterr().out)) == 4
    assert run(["eval-readability", "--corpus", str(small_corpus)]) == 1


def test_external_scores(tmp_path, small_corpus, capsys):
    scores = tmp_path / "model.csv"
    scores.write_text("id,value\n" + "".join(f"s{i:05d},{i % 7}\n" for i in range(300)), encoding="utf-8")
    assert run(["eval-readability", "--corpus", str(small_corpus), "--scores", f"model={scores}",
                "--group-by", "none"]) == 0
    out = rows(capsys.readouterr().out)
    assert out[0]["metric"] == "model" and out[0]["group"] == "all"


def test_report_tables(small_corpus, capsys):
    assert run(["report", "--corpus", str(small_corpus), "--split", "all"]) == 0
    assert len(rows(capsys.readouterr().out)) == 30
    assert run(["report", "--corpus", str(small_corpus), "--table", "jargon"]) == 0
    table = rows(capsys.readouterr().out)
    assert [r["type"] for r in table] == ["Medical Jargon", "Abbreviation", "General Complex",
                                          "Multi-sense", "All Categories"]


def test_features(tmp_path, small_corpus, capsys):
    assert run(["features", "--corpus", str(small_corpus)]) == 1
    (tmp_path / "aoa.tsv").write_text("the\t3\n", encoding="utf-8")
    (tmp_path / "zipf.tsv").write_text("the\t7\n", encoding="utf-8")
    (tmp_path / "common2000.txt").write_text("the\n", encoding="utf-8")
    assert run(["features", "--corpus", str(small_corpus), "--resources", str(tmp_path), "--correlate"]) == 0
    ranked = rows(capsys.readouterr().out)
    assert ranked[0]["feature"].startswith(("jargon", "t_", "n_soph", "aoa", "zipf", "avg", "corr"))


def test_config_defaults(tmp_path, small_corpus, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"corpus": str(small_corpus), "metric": "length", "split": "dev"}), encoding="utf-8")
    assert run(["score", "--config", str(cfg)]) == 0
    out = rows(capsys.readouterr().out)
    assert {r["metric"] for r in out} == {"length"} and {r["split"] for r in out} == {"dev"}


def test_ingest_round_trip(tmp_path, capsys):
    raw = tmp_path / "raw.jsonl"
    raw.write_text(json.dumps({"sid": "a", "tokens": ["LTFU", "rose"], "r": 3,
                               "spans": [[0, 1, "medical-abbreviation"]]}) + "\n", encoding="utf-8")
    mapping = tmp_path / "map.json"
    mapping.write_text(json.dumps({"fields": {"id": "sid", "rating": "r"}, "defaults": {"source": "msd"}}),
                       encoding="utf-8")
    out = tmp_path / "corpus.jsonl"
    assert run(["ingest", "--input", str(raw), "--mapping", str(mapping), "--out", str(out)]) == 0
    assert run(["validate", "--corpus", str(out)]) == 0
    assert json.loads(out.read_text())["spans"] == [{"start": 0, "end": 1, "category": "medical-abbreviation"}]


def test_subcommand_defaults_do_not_leak():
    from medread.cli import build_parser

    parser, _ = build_parser()
    expected = {"score": ("all", "gold"), "eval-spans": ("test", "lexicon"), "tune-alpha": ("dev", "gold"),
                "report": ("all", "gold")}
    for command, (split, jargon) in expected.items():
        args = parser.parse_args([command, "--corpus", "x"])
        assert (args.split, args.jargon) == (split, jargon)
