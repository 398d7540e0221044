import json
import subprocess
import sys
from pathlib import Path

import pytest

from tweetmine.cli import load_config, parse_k_range, run

FIX = Path(__file__).parent / "fixtures"
CONFIG = str(FIX / "pipeline.toml")


def _run(*argv):
    return run([str(a) for a in argv])


@pytest.fixture
def work(tmp_path):
    return tmp_path / "work"


def test_ingest_fixture_counts(work, capsys):
    gaz = FIX / "gazetteer_small.tsv"
    cfg = work.parent / "c.toml"
    cfg.write_text(f'[input]\npath = "{FIX / "tweets10.csv"}"\n[resources]\ngazetteer = "{gaz}"\n', encoding="utf-8")
    assert _run("ingest", "--config", cfg, "--output", work) == 0
    assert len((work / "tweets.jsonl").read_text(encoding="utf-8").splitlines()) == 7
    stats = json.loads((work / "ingest_stats.json").read_text())
    assert stats["emitted"] == 7 and stats["dropped_location"] == 3
    manifest = json.loads((work / "manifests" / "ingest.json").read_text())
    assert manifest["seed"] == 0 and set(manifest["inputs"]) == {"input", "resource:gazetteer"}
    assert manifest["counts"] == stats
    assert set(manifest["versions"]) >= {"tweetmine", "numpy", "numba", "python"}


def test_ingest_header_only(work, tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("id,user_location,date,text\n", encoding="utf-8")
    assert _run("ingest", "--input", p, "--output", work) == 0
    assert (work / "tweets.jsonl").read_text() == ""
    assert json.loads((work / "ingest_stats.json").read_text())["total"] == 0


def test_ingest_missing_column_is_usage_error(work, tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("id,place,date,text\n", encoding="utf-8")
    assert _run("ingest", "--input", p, "--output", work) == 2
    assert "schema error" in capsys.readouterr().err


def test_usage_and_config_errors(work, tmp_path):
    assert _run("frobnicate") == 2
    assert _run("ingest", "--output", work) == 2  # no input configured
    assert _run("ingest", "--config", tmp_path / "nope.toml") == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("[lda\nK = ", encoding="utf-8")
    assert _run("ingest", "--config", bad) == 2
    bad.write_text('[resources]\nlexicon = "missing.tsv"\n', encoding="utf-8")
    assert _run("sentiment", "--config", bad, "--output", work) == 2
    bad.write_text("[lda]\nK = 3\niterations = 5\nburn_in = 9\n", encoding="utf-8")
    assert _run("topics", "--config", bad, "--output", work) == 2


def test_missing_upstream_artifacts(work):
    work.mkdir()
    assert _run("preprocess", "--output", work) == 3
    assert _run("sentiment", "--output", work) == 3
    assert _run("topics", "--k", 2, "--output", work) == 3
    assert _run("report", "--output", work) == 3


def test_corrupt_artifact_is_data_error(work):
    work.mkdir()
    (work / "documents.jsonl").write_text("{not json\n", encoding="utf-8")
    assert _run("topics", "--k", 2, "--output", work) == 4


def test_empty_k_range_is_usage_error(work):
    assert _run("topics", "--k-range", "5..3", "--output", work) == 2
    assert _run("sweep-k", "--k-range", "", "--output", work) == 2
    assert _run("sweep-k", "--output", work) == 2


def test_parse_k_range():
    assert parse_k_range("1..4") == [1, 2, 3, 4]
    assert parse_k_range("2, 5,9") == [2, 5, 9]
    for bad in ("", "3..1", "a..b", "0..2"):
        with pytest.raises(Exception):
            parse_k_range(bad)


def test_config_paths_relative_to_file():
    cfg = load_config(CONFIG)
    assert cfg.input == FIX / "tweets200.csv"
    assert cfg.seed == 42 and cfg.lda.K == 5 and cfg.lda.iterations == 300


def test_sentiment_texts_file(work):
    assert _run("sentiment", "--texts", FIX / "reference_sentences.txt", "--output", work) == 0
    rows = [json.loads(line) for line in (work / "scores.jsonl").read_text(encoding="utf-8").splitlines()]
    assert [round(r["compound"], 4) for r in rows] == [0.9469, -0.5461, 0.8633, 0.7003, 0.431]
    assert [r["polarity"] for r in rows] == ["positive", "negative", "positive", "positive", "positive"]


def test_sentiment_empty_snapshot(work):
    work.mkdir()
    (work / "tweets.jsonl").write_text("", encoding="utf-8")
    assert _run("sentiment", "--output", work) == 0
    assert (work / "sentiment.jsonl").read_text() == ""


def _pipeline(work, *extra):
    for cmd in ("ingest", "preprocess", "sentiment", "topics", "report"):
        assert _run(cmd, "--config", CONFIG, "--output", work, *extra) == 0, cmd


def test_topics_deterministic_and_seed_sensitive(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for w in (a, b):
        for cmd in ("ingest", "preprocess"):
            assert _run(cmd, "--config", CONFIG, "--output", w) == 0
        assert _run("topics", "--config", CONFIG, "--output", w, "--iterations", 60) == 0
    assert (a / "model.json").read_bytes() == (b / "model.json").read_bytes()
    assert _run("topics", "--config", CONFIG, "--output", b, "--iterations", 60, "--seed", 7) == 0
    assert (a / "model.json").read_bytes() != (b / "model.json").read_bytes()


def test_topics_with_k_range_and_sweep(work):
    for cmd in ("ingest", "preprocess"):
        assert _run(cmd, "--config", CONFIG, "--output", work) == 0
    assert _run("topics", "--config", CONFIG, "--output", work, "--k-range", "2..4", "--iterations", 40) == 0
    coh = json.loads((work / "coherence.json").read_text())
    model = json.loads((work / "model.json").read_text())
    assert model["config"]["K"] == coh["best_k"]
    assert sorted(coh["per_k"]) == ["2", "3", "4"]
    assert _run("sweep-k", "--config", CONFIG, "--output", work, "--k-range", "3..3", "--iterations", 40) == 0
    assert json.loads((work / "coherence.json").read_text())["best_k"] == 3


def test_report_rejects_mismatched_model(work):
    for cmd in ("ingest", "preprocess", "sentiment"):
        assert _run(cmd, "--config", CONFIG, "--output", work) == 0
    docs = (work / "documents.jsonl").read_text(encoding="utf-8").splitlines()
    (work / "documents.jsonl").write_text("\n".join(docs[:20]) + "\n", encoding="utf-8")
    assert _run("topics", "--k", 2, "--iterations", 5, "--output", work) == 0
    (work / "documents.jsonl").write_text("\n".join(docs[:21]) + "\n", encoding="utf-8")
    assert _run("report", "--output", work) == 4


def test_manifest_records_outputs(work):
    _pipeline(work)
    m = json.loads((work / "manifests" / "report.json").read_text())
    assert m["seed"] == 42
    assert "report/topic_rankings.json" in m["outputs"]
    assert set(m["inputs"]) == {"documents.jsonl", "sentiment.jsonl", "model.json"}
    assert not (work / "report" / "manifests").exists()


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "tweetmine", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "tweetmine" in out.stdout
