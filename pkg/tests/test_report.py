import csv
import json

from tweetmine.analytics import SentimentDistribution
from tweetmine.report import _round_floats, bundle_files, sentiment_svg, write_csv, write_json

GOLDEN_FILES = [
    "corpus_summary.json", "country_counts.csv", "country_terms.csv", "country_terms.json",
    "emotional_words.csv", "emotional_words.json", "sentiment_CA.svg", "sentiment_GB.svg",
    "sentiment_IN.svg", "sentiment_US.svg", "sentiment_distribution.csv", "sentiment_distribution.json",
    "top_terms.csv", "top_terms.json", "topic_rankings.csv", "topic_rankings.json",
]


def test_json_is_sorted_and_newline_terminated(tmp_path):
    p = tmp_path / "x.json"
    write_json(p, {"b": 1, "a": [1.5, "é"]})
    text = p.read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"b"') and text.endswith("}\n") and "é" in text


def test_csv_uses_unix_newlines(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, ["a", "b"], [[1, "x,y"]])
    assert p.read_bytes() == b'a,b\n1,"x,y"\n'


def test_round_floats_nested():
    assert _round_floats({"a": [0.1234567891, {"b": 2.0000001}], "c": 3}) == {"a": [0.123457, {"b": 2.0}], "c": 3}


def test_svg_bars_scale_to_peak():
    cells = [SentimentDistribution("IN", "Moderna", 4, 1, 2), SentimentDistribution("US", "Moderna", 9, 0, 0)]
    svg = sentiment_svg("IN", cells)
    assert svg.startswith("<svg") and svg.endswith("</svg>\n")
    assert svg.count("<rect") == 3
    assert 'height="220.00"' in svg  # the tallest IN bar uses the full height
    assert "Moderna positive: 4" in svg and "US" not in svg.split("\n", 2)[2]


def test_golden_bundle_layout(fixtures):
    golden = fixtures.parent / "golden" / "report"
    assert bundle_files(golden) == sorted(GOLDEN_FILES)
    summary = json.loads((golden / "corpus_summary.json").read_text())
    assert sum(summary["polarity_counts"].values()) == summary["documents"]
    with open(golden / "sentiment_distribution.csv", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            assert int(row["total"]) == int(row["positive"]) + int(row["neutral"]) + int(row["negative"])
    rankings = json.loads((golden / "topic_rankings.json").read_text())
    assert len(rankings["positive"]["ranked"]) == 5
    assert all(len(t["words"]) == 10 for t in rankings["positive"]["ranked"])
    assert sum(rankings["counts"]["positive"].values()) == summary["polarity_counts"]["positive"]
