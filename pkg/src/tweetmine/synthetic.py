"""Planted-topic corpora drawn from the LDA generative process."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class PlantedCorpus:
    docs: list          # list of token lists
    theta: np.ndarray   # D x K true document-topic proportions
    phi: np.ndarray     # K x V true topic-word distributions
    vocab: list         # V words, column order of ``phi``
    labels: np.ndarray  # dominant true topic per document

    def topic_words(self, k: int) -> set:
        return {self.vocab[w] for w in np.flatnonzero(self.owner == k)}

    @property
    def owner(self) -> np.ndarray:
        """Index of the topic whose vocabulary contains each word."""
        return np.argmax(self.phi > 0, axis=0)


def planted_corpus(n_docs: int = 200, n_topics: int = 2, words_per_topic: int = 20, doc_len: int = 50,
                   alpha: float = 0.01, eta: float = 0.1, seed: int = 0,
                   shuffle_vocab: bool = True) -> PlantedCorpus:
    """Sample documents with disjoint per-topic vocabularies.

    theta_d ~ Dir(alpha), each topic's word distribution ~ Dir(eta) over its
    own ``words_per_topic`` words, then for every position a topic and a word.
    With ``shuffle_vocab`` the word names are assigned to topics at random, so
    alphabetical order says nothing about topic membership.
    """
    rng = np.random.default_rng(seed)
    V = n_topics * words_per_topic
    vocab = [f"w{j:03d}" for j in range(V)]
    columns = rng.permutation(V) if shuffle_vocab else np.arange(V)
    phi = np.zeros((n_topics, V))
    for k in range(n_topics):
        own = columns[k * words_per_topic:(k + 1) * words_per_topic]
        phi[k, own] = rng.dirichlet(np.full(words_per_topic, eta))
    theta = rng.dirichlet(np.full(n_topics, alpha), size=n_docs)
    docs = []
    for d in range(n_docs):
        z = rng.choice(n_topics, size=doc_len, p=theta[d])
        docs.append([vocab[rng.choice(V, p=phi[k])] for k in z])
    return PlantedCorpus(docs, theta, phi, vocab, theta.argmax(axis=1))
