"""Writers for the report bundle (CSV, JSON and SVG bar charts).

Every file is written with sorted keys, fixed float formatting and ``\\n``
line endings, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import os
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from . import analytics
from .corpus import BRAND_NAMES
from .sentiment import Polarity, SentimentLexicon
from .topicmodel import TopicModel

POLARITY_COLORS = {"positive": "#4c9a2a", "neutral": "#9e9e9e", "negative": "#c0392b"}


@dataclass
class ReportOptions:
    top_terms: int = 10
    country_terms: int = 50
    top_countries: int = 8
    emotional_n: int = 30
    topics_top: int = 5
    topic_words: int = 10
    svg: bool = True


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_json(path: Path, data) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path: Path, header: list, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _round_floats(obj, places: int = 6):
    if isinstance(obj, float):
        return round(obj, places)
    if isinstance(obj, dict):
        return {k: _round_floats(v, places) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, places) for v in obj]
    return obj


def sentiment_svg(country: str, cells: list) -> str:
    """Grouped bar chart of polarity counts per brand for one country."""
    bar, gap, group_gap, height, top, left = 14, 2, 18, 220, 30, 40
    groups = [c for c in cells if c.country == country]
    width = left + len(groups) * (3 * bar + 2 * gap + group_gap) + 20
    peak = max((max(c.positive, c.neutral, c.negative) for c in groups), default=0) or 1
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height + top + 80}">',
        f'<text x="{left}" y="18" font-size="13">Sentiment by brand: {country}</text>',
    ]
    x = left
    for cell in groups:
        for j, pol in enumerate(("positive", "neutral", "negative")):
            n = getattr(cell, pol)
            h = height * n / peak
            bx = x + j * (bar + gap)
            parts.append(
                f'<rect x="{bx}" y="{top + height - h:.2f}" width="{bar}" height="{h:.2f}" '
                f'fill="{POLARITY_COLORS[pol]}"><title>{cell.brand} {pol}: {n}</title></rect>'
            )
        label_x = x + (3 * bar + 2 * gap) / 2
        parts.append(
            f'<text x="{label_x:.1f}" y="{top + height + 12}" font-size="9" text-anchor="end" '
            f'transform="rotate(-40 {label_x:.1f} {top + height + 12})">{cell.brand}</text>'
        )
        x += 3 * bar + 2 * gap + group_gap
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def build_report(outdir, docs: list, polarity_of: dict, model: TopicModel, lex: SentimentLexicon,
                 opts: ReportOptions | None = None) -> list[str]:
    """Write the full report bundle into ``outdir``; returns the file names."""
    opts = opts or ReportOptions()
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def done(name):
        written.append(name)
        return out / name

    # overall polarity and country shares
    pol_counts = Counter(Polarity(polarity_of[d.tweet_id]).value for d in docs)
    country_counts = Counter(d.country or analytics.UNKNOWN_COUNTRY for d in docs)
    total = len(docs)
    write_json(done("corpus_summary.json"), {
        "documents": total,
        "polarity_counts": {p.value: pol_counts.get(p.value, 0) for p in Polarity},
        "polarity_proportions": {p.value: round(pol_counts.get(p.value, 0) / total, 6) if total else 0.0
                                 for p in Polarity},
    })
    ranked_countries = sorted(country_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    write_csv(done("country_counts.csv"), ["country", "tweets", "share"],
              [[c, n, _fmt(n / total)] for c, n in ranked_countries])

    # high-frequency words
    table = analytics.top_terms(docs, opts.top_terms)
    weights = analytics.wordcloud_weights(table) if table.entries else []
    write_csv(done("top_terms.csv"), ["term", "count", "weight"],
              [[t, c, _fmt(w)] for (t, c), (_, w) in zip(table.entries, weights)])
    write_json(done("top_terms.json"), _round_floats({
        "scope": str(table.scope),
        "entries": [{"term": t, "count": c, "weight": w} for (t, c), (_, w) in zip(table.entries, weights)],
    }))

    # prevalent words per country
    known = [c for c, _ in ranked_countries if c != analytics.UNKNOWN_COUNTRY][:opts.top_countries]
    by_country, rows = {}, []
    for c in known:
        t = analytics.top_terms(docs, opts.country_terms, analytics.Scope("country", c))
        wts = analytics.wordcloud_weights(t)
        by_country[c] = [{"term": term, "count": n, "weight": w} for (term, n), (_, w) in zip(t.entries, wts)]
        rows.extend([c, term, n, _fmt(w)] for (term, n), (_, w) in zip(t.entries, wts))
    write_json(done("country_terms.json"), _round_floats(by_country))
    write_csv(done("country_terms.csv"), ["country", "term", "count", "weight"], rows)

    # emotional words per brand
    groups = analytics.group_by_brand(docs)
    emo = analytics.emotional_top30(groups, lex, opts.emotional_n)
    write_json(done("emotional_words.json"), {b: e.as_dict() for b, e in emo.items()})
    rows = []
    for b, e in emo.items():
        sign = {w: "positive" for w in e.positive} | {w: "negative" for w in e.negative} | {w: "neutral" for w in e.neutral}
        rows.extend([b, rank, w, n, sign[w]] for rank, (w, n) in enumerate(e.ranked, 1))
    write_csv(done("emotional_words.csv"), ["brand", "rank", "word", "count", "polarity"], rows)

    # country x brand sentiment distribution
    cells = analytics.sentiment_distribution(
        ((d.country, d.brands, polarity_of[d.tweet_id]) for d in docs),
        countries=known, brands=list(BRAND_NAMES),
    )
    write_json(done("sentiment_distribution.json"), _round_floats([c.as_dict() for c in cells]))
    rows = []
    for c in cells:
        p = c.proportions()
        rows.append([c.country, c.brand, c.positive, c.neutral, c.negative, c.total,
                     _fmt(p["positive"]), _fmt(p["neutral"]), _fmt(p["negative"])])
    write_csv(done("sentiment_distribution.csv"),
              ["country", "brand", "positive", "neutral", "negative", "total",
               "positive_share", "neutral_share", "negative_share"], rows)
    if opts.svg:
        for c in known[:4]:
            name = f"sentiment_{c}.svg"
            with open(done(name), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(sentiment_svg(c, cells))

    # topic popularity by polarity
    pos, neg = analytics.topic_popularity(model, polarity_of, opts.topic_words)
    write_json(done("topic_rankings.json"), {
        "K": model.K,
        "positive": pos.as_dict(opts.topics_top),
        "negative": neg.as_dict(opts.topics_top),
        "counts": {
            "positive": {str(k): c for k, c, _ in sorted(pos.ranked)},
            "negative": {str(k): c for k, c, _ in sorted(neg.ranked)},
        },
    })
    rows = []
    for r in (pos, neg):
        rows.extend([r.polarity.value, rank, k, c, " ".join(w)] for rank, (k, c, w) in enumerate(r.top(opts.topics_top), 1))
    write_csv(done("topic_rankings.csv"), ["polarity", "rank", "topic", "tweets", "top_words"], rows)
    return written


def bundle_files(outdir) -> list[str]:
    return sorted(p for p in os.listdir(outdir) if os.path.isfile(os.path.join(outdir, p)))
