"""Corpus aggregations: frequent terms, word-cloud weights, emotional words
per brand, country x brand sentiment counts and per-polarity topic rankings.

All functions are pure; ties are always broken by term or key so repeated
runs give identical output.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from .sentiment import Polarity, SentimentLexicon, default_lexicon, emotional_words
from .topicmodel import TopicModel, dominant_topics, top_words

UNTAGGED = "(untagged)"
UNKNOWN_COUNTRY = "(unknown)"


@dataclass(frozen=True)
class Scope:
    kind: str = "global"  # global | country | brand | polarity
    value: Optional[str] = None

    def __str__(self) -> str:
        return self.kind if self.kind == "global" else f"{self.kind}={self.value}"

    def matches(self, doc, polarity_of: Mapping | None = None) -> bool:
        if self.kind == "global":
            return True
        if self.kind == "country":
            return doc.country == self.value
        if self.kind == "brand":
            return self.value in doc.brands
        if self.kind == "polarity":
            if polarity_of is None:
                raise ValueError("polarity scope needs polarity_of")
            return Polarity(polarity_of[doc.tweet_id]) == Polarity(self.value)
        raise ValueError(f"unknown scope kind {self.kind!r}")


GLOBAL = Scope()


def _ranked(counter: Counter) -> list:
    return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))


@dataclass
class FrequencyTable:
    entries: list
    scope: Scope = GLOBAL

    def as_dict(self) -> dict:
        return {"scope": str(self.scope), "entries": [[t, c] for t, c in self.entries]}


def term_counts(docs, scope: Scope = GLOBAL, polarity_of: Mapping | None = None) -> Counter:
    counts: Counter = Counter()
    for doc in docs:
        if scope.matches(doc, polarity_of):
            counts.update(doc.tokens)
    return counts


def top_terms(docs, n: int, scope: Scope = GLOBAL, polarity_of: Mapping | None = None) -> FrequencyTable:
    """The ``n`` most frequent tokens in the docs selected by ``scope``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return FrequencyTable(_ranked(term_counts(docs, scope, polarity_of))[:n], scope)


def wordcloud_weights(table: FrequencyTable) -> list[tuple[str, float]]:
    """Counts scaled by the largest count, in table order."""
    if not table.entries:
        raise ValueError("word-cloud weights need a non-empty table")
    top = max(c for _, c in table.entries)
    return [(t, c / top) for t, c in table.entries]


@dataclass
class EmotionalWords:
    ranked: list  # top (word, count) lexicon hits
    positive: list = field(default_factory=list)
    negative: list = field(default_factory=list)
    neutral: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "ranked": [[w, c] for w, c in self.ranked],
            "positive": list(self.positive),
            "negative": list(self.negative),
            "neutral": list(self.neutral),
        }


def emotional_topn(docs, lex: SentimentLexicon | None = None, n: int = 30) -> EmotionalWords:
    lex = lex or default_lexicon()
    counts: Counter = Counter()
    signs = {}
    for doc in docs:
        for word, pol in emotional_words(doc.tokens, lex):
            counts[word] += 1
            signs[word] = pol
    ranked = _ranked(counts)[:n]
    out = EmotionalWords(ranked)
    for word, _ in ranked:
        {Polarity.POSITIVE: out.positive, Polarity.NEGATIVE: out.negative,
         Polarity.NEUTRAL: out.neutral}[signs[word]].append(word)
    return out


def group_by_brand(docs) -> dict:
    groups: dict[str, list] = {}
    for doc in docs:
        for b in sorted(doc.brands):
            groups.setdefault(b, []).append(doc)
    return groups


def emotional_top30(groups: Mapping[str, Iterable], lex: SentimentLexicon | None = None,
                    n: int = 30) -> dict[str, EmotionalWords]:
    """Per brand: the ``n`` most frequent lexicon words split by valence sign."""
    out = {}
    for brand in sorted(groups):
        docs = list(groups[brand])
        if not docs:
            raise ValueError(f"brand group {brand!r} is empty")
        out[brand] = emotional_topn(docs, lex, n)
    return out


@dataclass
class SentimentDistribution:
    country: str
    brand: str
    positive: int = 0
    neutral: int = 0
    negative: int = 0

    @property
    def total(self) -> int:
        return self.positive + self.neutral + self.negative

    def proportions(self) -> dict:
        t = self.total
        if not t:
            return {"positive": 0.0, "neutral": 0.0, "negative": 0.0}
        return {"positive": self.positive / t, "neutral": self.neutral / t, "negative": self.negative / t}

    def as_dict(self) -> dict:
        return {
            "country": self.country,
            "brand": self.brand,
            "counts": {"positive": self.positive, "neutral": self.neutral, "negative": self.negative},
            "proportions": self.proportions(),
            "total": self.total,
        }


def sentiment_distribution(records: Iterable, countries: Iterable[str] | None = None,
                           brands: Iterable[str] | None = None) -> list[SentimentDistribution]:
    """Count polarities per (country, brand) cell.

    ``records`` yields ``(country, brands, polarity)``. A tweet with several
    brands counts once in each brand's cell; a tweet with none goes to the
    ``(untagged)`` cell. Cells named in ``countries`` x ``brands`` are reported
    even when empty.
    """
    cells: dict[tuple, SentimentDistribution] = {}

    def cell(c, b):
        key = (c, b)
        if key not in cells:
            cells[key] = SentimentDistribution(c, b)
        return cells[key]

    if countries is not None and brands is not None:
        for c in countries:
            for b in brands:
                cell(c, b)
    for country, tags, pol in records:
        country = country or UNKNOWN_COUNTRY
        pol = Polarity(pol)
        for b in sorted(tags) or [UNTAGGED]:
            dist = cell(country, b)
            setattr(dist, pol.value, getattr(dist, pol.value) + 1)
    return [cells[k] for k in sorted(cells)]


@dataclass
class TopicRanking:
    polarity: Polarity
    ranked: list  # (topic, tweet count, top words), count descending

    def top(self, n: int = 5) -> list:
        return self.ranked[:n]

    def as_dict(self, n: int | None = None) -> dict:
        rows = self.ranked if n is None else self.ranked[:n]
        return {
            "polarity": self.polarity.value,
            "ranked": [{"topic": t, "count": c, "words": list(w)} for t, c, w in rows],
        }


def topic_popularity(model: TopicModel, polarity_of: Mapping, n_words: int = 10) -> tuple[TopicRanking, TopicRanking]:
    """Rank topics by how many positive / negative tweets they dominate.

    A document's topic is the argmax of its theta row (first topic on ties).
    Every topic appears in both rankings, zero counts included, so counts sum
    to the number of documents of that polarity.
    """
    dom = dominant_topics(model)
    words = [top_words(model, k, n_words) for k in range(model.K)]
    rankings = []
    for pol in (Polarity.POSITIVE, Polarity.NEGATIVE):
        counts = np.zeros(model.K, dtype=int)
        for doc_id, k in zip(model.doc_ids, dom):
            if Polarity(polarity_of[doc_id]) == pol:
                counts[k] += 1
        order = sorted(range(model.K), key=lambda k: (-counts[k], k))
        rankings.append(TopicRanking(pol, [(k, int(counts[k]), words[k]) for k in order]))
    return rankings[0], rankings[1]
