"""LDA topic modelling with a collapsed Gibbs sampler, UMass coherence and a
topic-count sweep.

Each token's topic is resampled from

    p(z = k | rest) ∝ (n_dk + alpha) * (n_kw + eta) / (n_k + V * eta)

with the token's own assignment removed from the counts. Point estimates of
the document-topic and topic-word distributions come from the final sample.
"""
from __future__ import annotations

import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from numba import njit

logger = logging.getLogger(__name__)

MODEL_FORMAT = "tweetmine-lda"
MODEL_VERSION = 1


@dataclass(frozen=True)
class LdaConfig:
    K: int
    alpha: float = 0.01
    eta: float = 0.1
    iterations: int = 1000
    burn_in: int = 200
    seed: int = 0

    def validate(self) -> None:
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if not (self.alpha > 0 and self.eta > 0):
            raise ValueError("alpha and eta must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError(f"need 0 <= burn_in < iterations, got {self.burn_in}/{self.iterations}")


@njit(cache=True, nogil=True)
def _cumulative_weights(d, w, n_dk, n_kw, n_k, alpha, eta, v_eta, out):
    total = 0.0
    for t in range(n_k.shape[0]):
        total += (n_dk[d, t] + alpha) * (n_kw[t, w] + eta) / (n_k[t] + v_eta)
        out[t] = total
    return total


@njit(cache=True, nogil=True)
def _sweep(words, doc_of, z, n_dk, n_kw, n_k, alpha, eta, v_eta, u, buf):
    K = n_k.shape[0]
    for i in range(words.shape[0]):
        w = words[i]
        d = doc_of[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        total = _cumulative_weights(d, w, n_dk, n_kw, n_k, alpha, eta, v_eta, buf)
        r = u[i] * total
        k = 0
        while k < K - 1 and buf[k] <= r:
            k += 1
        z[i] = k
        n_dk[d, k] += 1
        n_kw[k, w] += 1
        n_k[k] += 1


def _tokens_of(doc) -> Sequence[str]:
    return doc.tokens if hasattr(doc, "tokens") else doc


@dataclass
class TopicModel:
    """Sampler state: vocabulary, flattened corpus, assignments and counts."""

    vocab: list
    cfg: LdaConfig
    doc_ids: list
    offsets: np.ndarray  # D+1 token offsets into ``words``
    words: np.ndarray
    z: np.ndarray
    n_dk: np.ndarray = field(repr=False)
    n_kw: np.ndarray = field(repr=False)
    n_k: np.ndarray = field(repr=False)

    @property
    def K(self) -> int:
        return self.cfg.K

    @property
    def V(self) -> int:
        return len(self.vocab)

    @property
    def D(self) -> int:
        return len(self.offsets) - 1

    @property
    def doc_of(self) -> np.ndarray:
        return np.repeat(np.arange(self.D, dtype=np.int64), np.diff(self.offsets))

    @property
    def theta(self) -> np.ndarray:
        lengths = np.diff(self.offsets).astype(float)
        return (self.n_dk + self.cfg.alpha) / (lengths[:, None] + self.K * self.cfg.alpha)

    @property
    def phi(self) -> np.ndarray:
        return (self.n_kw + self.cfg.eta) / (self.n_k[:, None] + self.V * self.cfg.eta)

    def word_index(self) -> dict:
        return {w: i for i, w in enumerate(self.vocab)}

    def recount(self) -> None:
        self.n_dk, self.n_kw, self.n_k = count_matrices(self.doc_of, self.words, self.z, self.D, self.K, self.V)

    def check_counts(self) -> None:
        """Raise AssertionError if counts disagree with the assignments."""
        lengths = np.diff(self.offsets)
        assert (self.n_dk >= 0).all() and (self.n_kw >= 0).all()
        assert np.array_equal(self.n_dk.sum(axis=1), lengths)
        assert np.array_equal(self.n_kw.sum(axis=1), self.n_k)
        assert int(self.n_dk.sum()) == len(self.words)
        n_dk, n_kw, n_k = count_matrices(self.doc_of, self.words, self.z, self.D, self.K, self.V)
        assert np.array_equal(n_dk, self.n_dk) and np.array_equal(n_kw, self.n_kw) and np.array_equal(n_k, self.n_k)

    # serialisation -----------------------------------------------------
    def to_json(self) -> str:
        return json.dumps(
            {
                "format": MODEL_FORMAT,
                "version": MODEL_VERSION,
                "config": asdict(self.cfg),
                "vocab": list(self.vocab),
                "doc_ids": list(self.doc_ids),
                "offsets": self.offsets.tolist(),
                "words": self.words.tolist(),
                "z": self.z.tolist(),
            },
            separators=(",", ":"),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "TopicModel":
        data = json.loads(text)
        if data.get("format") != MODEL_FORMAT or data.get("version") != MODEL_VERSION:
            raise ValueError(f"not a {MODEL_FORMAT} v{MODEL_VERSION} model file")
        cfg = LdaConfig(**data["config"])
        model = cls(
            vocab=data["vocab"],
            cfg=cfg,
            doc_ids=data["doc_ids"],
            offsets=np.asarray(data["offsets"], dtype=np.int64),
            words=np.asarray(data["words"], dtype=np.int64),
            z=np.asarray(data["z"], dtype=np.int64),
            n_dk=np.empty(0), n_kw=np.empty(0), n_k=np.empty(0),
        )
        model.recount()
        return model

    @classmethod
    def load(cls, path) -> "TopicModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def count_matrices(doc_of, words, z, D, K, V):
    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    np.add.at(n_dk, (doc_of, z), 1)
    np.add.at(n_kw, (z, words), 1)
    return n_dk, n_kw, n_kw.sum(axis=1)


def init_state(docs, cfg: LdaConfig, rng: np.random.Generator | None = None) -> TopicModel:
    """Build the corpus arrays and draw uniform random initial topics."""
    cfg.validate()
    docs = list(docs)
    if not docs:
        raise ValueError("cannot fit LDA on an empty corpus")
    token_lists = [list(_tokens_of(d)) for d in docs]
    empty = [i for i, t in enumerate(token_lists) if not t]
    if empty:
        raise ValueError(f"documents without tokens at positions {empty[:10]}")
    vocab = sorted({w for toks in token_lists for w in toks})
    index = {w: i for i, w in enumerate(vocab)}
    words = np.fromiter((index[w] for toks in token_lists for w in toks), dtype=np.int64)
    offsets = np.zeros(len(docs) + 1, dtype=np.int64)
    np.cumsum([len(t) for t in token_lists], out=offsets[1:])
    if cfg.K > len(words):
        warnings.warn(f"K={cfg.K} exceeds the {len(words)} tokens in the corpus", RuntimeWarning, stacklevel=3)
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    z = rng.integers(0, cfg.K, size=len(words), dtype=np.int64)
    doc_ids = [getattr(d, "tweet_id", str(i)) for i, d in enumerate(docs)]
    model = TopicModel(vocab, cfg, doc_ids, offsets, words, z, np.empty(0), np.empty(0), np.empty(0))
    model.recount()
    return model


def fit(docs, cfg: LdaConfig, on_sweep: Optional[Callable[[int, TopicModel], None]] = None) -> TopicModel:
    """Run ``cfg.iterations`` Gibbs sweeps; deterministic for a given seed.

    ``on_sweep(i, model)`` is called after every sweep, with the counts in a
    consistent state.
    """
    rng = np.random.default_rng(cfg.seed)
    model = init_state(docs, cfg, rng)
    doc_of = model.doc_of
    buf = np.empty(cfg.K, dtype=np.float64)
    v_eta = model.V * cfg.eta
    for it in range(cfg.iterations):
        u = rng.random(len(model.words))
        _sweep(model.words, doc_of, model.z, model.n_dk, model.n_kw, model.n_k,
               float(cfg.alpha), float(cfg.eta), float(v_eta), u, buf)
        if on_sweep is not None:
            on_sweep(it, model)
    return model


def gibbs_conditional(model: TopicModel, i: int) -> np.ndarray:
    """Normalised resampling distribution for token ``i`` at the current state."""
    w = int(model.words[i])
    d = int(np.searchsorted(model.offsets, i, side="right") - 1)
    k = int(model.z[i])
    n_dk = model.n_dk.copy()
    n_kw = model.n_kw.copy()
    n_k = model.n_k.copy()
    n_dk[d, k] -= 1
    n_kw[k, w] -= 1
    n_k[k] -= 1
    cum = np.empty(model.K, dtype=np.float64)
    total = _cumulative_weights(d, w, n_dk, n_kw, n_k, float(model.cfg.alpha), float(model.cfg.eta),
                                float(model.V * model.cfg.eta), cum)
    weights = np.diff(cum, prepend=0.0)
    return weights / total


def log_likelihood(model: TopicModel, theta=None, phi=None) -> float:
    """Sum over tokens of log sum_k theta[d,k] * phi[k,w]."""
    theta = model.theta if theta is None else theta
    phi = model.phi if phi is None else phi
    per_token = np.einsum("nk,kn->n", theta[model.doc_of], phi[:, model.words])
    return float(np.log(per_token).sum())


def top_words(model: TopicModel, k: int, n: int) -> list[str]:
    """The ``n`` most probable words of topic ``k``; ties go to the smaller word."""
    if not 0 <= k < model.K:
        raise IndexError(f"topic {k} out of range for K={model.K}")
    if n < 1:
        raise ValueError("n must be >= 1")
    # phi[k] is an increasing function of n_kw[k], so exact integer counts give the same order
    counts = model.n_kw[k]
    order = sorted(range(model.V), key=lambda w: (-counts[w], model.vocab[w]))
    return [model.vocab[w] for w in order[:n]]


def dominant_topics(model: TopicModel) -> np.ndarray:
    """argmax of each theta row; np.argmax already returns the first maximum."""
    return np.argmax(model.n_dk, axis=1)


def _doc_sets(docs) -> dict:
    occ: dict[str, set] = {}
    for j, d in enumerate(docs):
        for w in set(_tokens_of(d)):
            occ.setdefault(w, set()).add(j)
    return occ


def umass_topic_score(words: Sequence[str], occ: dict) -> float:
    """UMass score of one word list: sum_{i<j} log((D(wi,wj) + 1) / D(wi)).

    Words are ordered by descending document frequency first (ties by word).
    """
    ordered = sorted(words, key=lambda w: (-len(occ.get(w, ())), w))
    total = 0.0
    for i, wi in enumerate(ordered):
        di = occ.get(wi)
        if not di:
            raise RuntimeError(f"top word {wi!r} has zero document frequency in the reference corpus")
        for wj in ordered[i + 1:]:
            dj = occ.get(wj, set())
            total += math.log((len(di & dj) + 1) / len(di))
    return total


def coherence(model: TopicModel, docs, n: int = 10) -> float:
    """Mean UMass coherence of the model's topics over ``docs``."""
    occ = _doc_sets(docs)
    scores = [umass_topic_score(top_words(model, k, n), occ) for k in range(model.K)]
    return float(sum(scores) / len(scores))


@dataclass
class CoherenceResult:
    per_k: dict
    best_k: Optional[int]
    top_n: int = 10
    failed: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "per_k": {str(k): v for k, v in sorted(self.per_k.items())},
            "best_k": self.best_k,
            "top_n": self.top_n,
            "failed": {str(k): v for k, v in sorted(self.failed.items())},
        }


def sweep_k(docs, k_range: Sequence[int], template: LdaConfig, top_n: int = 10, threads: int = 1,
            keep_models: bool = False):
    """Fit one model per K (seed = template.seed + K) and pick the most coherent.

    Returns a :class:`CoherenceResult`; with ``keep_models`` also a dict of the
    fitted models. Chains run concurrently on up to ``threads`` workers.
    """
    ks = list(k_range)
    if not ks:
        raise ValueError("k_range is empty")
    docs = list(docs)

    def run(K):
        cfg = replace(template, K=K, seed=template.seed + K)
        model = fit(docs, cfg)
        return model, coherence(model, docs, top_n)

    per_k, failed, models = {}, {}, {}
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = {K: pool.submit(run, K) for K in ks}
        for K in ks:
            try:
                model, score = futures[K].result()
            except Exception as exc:  # a failed K is recorded, not fatal
                logger.warning("K=%d failed: %s", K, exc)
                failed[K] = f"{type(exc).__name__}: {exc}"
                continue
            per_k[K] = score
            if keep_models:
                models[K] = model
    best = None
    for K in sorted(per_k):
        if best is None or per_k[K] > per_k[best]:
            best = K
    result = CoherenceResult(per_k, best, top_n, failed)
    return (result, models) if keep_models else result
