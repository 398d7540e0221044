"""Throughput benchmark: sentiment tweets/s and Gibbs token-updates/s.

    python3 -m tweetmine.bench [--tweets N] [--tokens N] [--sweeps N]

Numbers are reported only; nothing is asserted.
"""
from __future__ import annotations

import argparse
import json
import os
import time

import numpy as np

from .sentiment import default_lexicon, score, score_many
from .synthetic import planted_corpus
from .topicmodel import LdaConfig, fit

SAMPLE_TWEETS = [
    "Got my first dose of Covaxin today and the side effects were mild, only a sore arm!",
    "Terrible headache and fever all night after the Pfizer shot :( side effects are REAL",
    "So proud of the scientists, amazing work on this vaccine \U0001F60D",
    "Long queue, bad management and no information at the vaccination centre",
    "Is Sputnik V actually safe?? nobody seems to know",
    "Not bad at all, the staff were kind and it was over in five minutes",
    "waiting for my Moderna appointment next week",
    "Why is there a supply shortage AGAIN? This is not okay.",
]


def bench_sentiment(n_tweets: int = 20000, workers: int = 1) -> dict:
    lex = default_lexicon()
    texts = [SAMPLE_TWEETS[i % len(SAMPLE_TWEETS)] + f" #{i}" for i in range(n_tweets)]
    score(texts[0], lex)
    t0 = time.perf_counter()
    for t in texts:
        score(t, lex)
    dt = time.perf_counter() - t0
    out = {"tweets": n_tweets, "seconds": dt, "tweets_per_s": n_tweets / dt}
    if workers > 1:
        t0 = time.perf_counter()
        score_many(texts, lex, workers=workers)
        dt = time.perf_counter() - t0
        out.update(workers=workers, parallel_seconds=dt, parallel_tweets_per_s=n_tweets / dt)
    return out


def bench_gibbs(n_tokens: int = 200_000, K: int = 20, sweeps: int = 20) -> dict:
    doc_len = 20
    corpus = planted_corpus(n_docs=n_tokens // doc_len, n_topics=K, words_per_topic=50, doc_len=doc_len,
                            alpha=0.1, seed=0)
    fit(corpus.docs[:50], LdaConfig(K=K, iterations=2, burn_in=0))  # compile outside the timer
    cfg = LdaConfig(K=K, iterations=sweeps, burn_in=0, seed=1)
    t0 = time.perf_counter()
    model = fit(corpus.docs, cfg)
    dt = time.perf_counter() - t0
    updates = len(model.words) * sweeps
    return {"tokens": int(len(model.words)), "K": K, "sweeps": sweeps, "seconds": dt,
            "updates_per_s": updates / dt}


def run_all(n_tweets: int = 20000, n_tokens: int = 200_000, sweeps: int = 20, workers: int = 1) -> dict:
    return {
        "cpu_count": os.cpu_count(),
        "numpy": np.__version__,
        "sentiment": bench_sentiment(n_tweets, workers),
        "gibbs": bench_gibbs(n_tokens, sweeps=sweeps),
    }


def main(argv=None) -> None:
    p = argparse.ArgumentParser(prog="python3 -m tweetmine.bench")
    p.add_argument("--tweets", type=int, default=20000)
    p.add_argument("--tokens", type=int, default=200_000)
    p.add_argument("--sweeps", type=int, default=20)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="processes for the parallel sentiment run")
    a = p.parse_args(argv)
    print(json.dumps(run_all(a.tweets, a.tokens, a.sweeps, a.workers), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
