"""Tweet text normalisation into LDA-ready token documents.

The chain is: strip handles/URLs/hashtags/emoji, tokenise and case-fold,
drop stopwords and non-English tokens, lemmatise, merge frequent bigrams,
and finally drop documents shorter than four tokens.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

import regex

from ._resources import read_lines, read_pairs, resource_path

logger = logging.getLogger(__name__)

MIN_DOC_TOKENS = 4

_URL = regex.compile(r"(?i)\b(?:https?://|www\.|t\.co/)\S*")
_HANDLE = regex.compile(r"(?<![\w@])@\w+")
_HASHTAG = regex.compile(r"(?<![\w#])#\w+")
# pictographs plus the joiners/modifiers that build emoji sequences; the plain
# Emoji property is avoided because it also covers ASCII digits, '#' and '*'
_EMOJI = regex.compile(
    r"[\p{Extended_Pictographic}\p{Emoji_Modifier}\p{Regional_Indicator}"
    r"\u200d\ufe0e\ufe0f\u20e3\U000e0020-\U000e007f]"
)
_TOKEN = regex.compile(r"[^\W_]+")


def strip_entities(text: str) -> str:
    """Remove URLs, @-handles, #hashtags and emoji, then collapse whitespace."""
    text = _URL.sub(" ", text)
    text = _HANDLE.sub(" ", text)
    text = _HASHTAG.sub(" ", text)
    text = _EMOJI.sub(" ", text)
    return " ".join(text.split())


def ascii_word(token: str) -> bool:
    """Default "English word" predicate: two or more ASCII letters."""
    return len(token) >= 2 and token.isascii() and token.isalpha()


_VOWELS = frozenset("aeiou")


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Porter's m: the number of vowel-consonant sequences in ``stem``."""
    m, prev_vowel = 0, False
    for i in range(len(stem)):
        cons = _is_consonant(stem, i)
        if cons and prev_vowel:
            m += 1
        prev_vowel = not cons
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_cvc(stem: str) -> bool:
    return (
        len(stem) >= 3
        and _is_consonant(stem, len(stem) - 3)
        and not _is_consonant(stem, len(stem) - 2)
        and _is_consonant(stem, len(stem) - 1)
        and stem[-1] not in "wxy"
    )


def _restore_e(stem: str) -> str:
    # after stripping -ed/-ing: put back a dropped final "e" (vaccinat -> vaccinate)
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "aeiouylszf":
        return stem[:-1]
    if stem.endswith(("bl", "iz")):
        return stem + "e"
    if len(stem) >= 3 and stem[-3] not in _VOWELS and stem[-2:] in ("at", "ut", "id", "ud", "od", "ur", "ir", "ul"):
        return stem + "e"
    if len(stem) >= 3 and stem.endswith("ar") and stem[-3] not in _VOWELS:
        return stem + "e"
    if stem[-1] in "cv":
        return stem + "e"
    if len(stem) >= 2 and stem[-1] in "sgz" and stem[-2] in _VOWELS:
        return stem + "e"
    if len(stem) >= 2 and stem[-1] == "g" and stem[-2] in "rld":
        return stem + "e"
    if _measure(stem) == 1 and _ends_cvc(stem):
        return stem + "e"
    return stem


def suffix_lemma(word: str) -> str:
    """One application of the inflectional suffix rules (-s/-es/-ies/-ed/-ing)."""
    if len(word) <= 3:
        return word
    if word.endswith("ies"):
        return word[:-3] + ("y" if len(word) > 4 else "ie")
    if word.endswith("ied"):
        return word[:-3] + ("y" if len(word) > 4 else "ie")
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith(("xes", "zes", "ches", "shes")):
        return word[:-2]
    if word.endswith("s"):
        if word.endswith(("ss", "us", "is", "ous")):
            return word
        return word[:-1]
    if word.endswith("eed"):
        return word[:-1] if _measure(word[:-3]) > 0 else word
    if word.endswith("ed") and _has_vowel(word[:-2]):
        return _restore_e(word[:-2])
    if word.endswith("ing") and len(word) > 4 and _has_vowel(word[:-3]):
        return _restore_e(word[:-3])
    return word


@dataclass
class Lexicons:
    stopwords: frozenset = frozenset()
    lemma_table: dict = field(default_factory=dict)
    allowed_charset: Callable[[str], bool] = ascii_word
    wordlist: Optional[frozenset] = None

    @classmethod
    def load(cls, stopwords=None, lemmas=None, extra_stopwords=None, wordlist=None) -> "Lexicons":
        """Load bundled (or given) stopword and lemma files.

        ``extra_stopwords`` is a user "meaningless words" file merged into the
        stopword set. ``wordlist``, when given, restricts tokens to an English
        vocabulary file (one word per line).
        """
        stop = {w.strip().lower() for w in read_lines(stopwords or resource_path("stopwords.txt"))}
        if extra_stopwords:
            stop |= {w.strip().lower() for w in read_lines(extra_stopwords)}
        table = {s.strip().lower(): l.strip().lower() for s, l in read_pairs(lemmas or resource_path("lemmas.tsv"))}
        words = frozenset(w.strip().lower() for w in read_lines(wordlist)) if wordlist else None
        return cls(frozenset(stop), table, ascii_word, words)

    def __post_init__(self):
        self._cache: dict[str, str] = {}

    def _step(self, word: str) -> str:
        hit = self.lemma_table.get(word)
        return hit if hit is not None else suffix_lemma(word)

    def lemma(self, word: str) -> str:
        """Lemma of ``word``; unknown words fall back to suffix rules.

        The table/rule step is iterated to a fixed point so ``lemma`` is
        idempotent. A word whose chain does not settle is left unchanged.
        """
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        cur = word
        for _ in range(6):
            nxt = self._step(cur)
            if nxt == cur:
                break
            cur = nxt
        else:
            cur = word
        if not cur or not self.allowed_charset(cur):
            cur = word
        self._cache[word] = cur
        return cur

    def admissible(self, token: str) -> bool:
        return token not in self.stopwords and self.allowed_charset(token)

    def keep(self, token: str) -> bool:
        return self.admissible(token) and (self.wordlist is None or token in self.wordlist)


def tokenize_normalize(text: str, lex: Lexicons) -> list[str]:
    """Case-fold, split on non-alphanumerics, filter and lemmatise.

    A token is kept only if both its surface form and its lemma pass the
    stopword and charset filters (the optional wordlist is checked against
    the lemma), which makes the function a fixed point on its own
    space-joined output.
    """
    out = []
    for tok in _TOKEN.findall(text.lower()):
        if not lex.admissible(tok):
            continue
        lemma = lex.lemma(tok)
        if not lex.keep(lemma):
            continue
        out.append(lemma)
    return out


@dataclass
class PhraseTable:
    min_count: int
    threshold: float
    scores: dict = field(default_factory=dict)  # (a, b) -> score

    def to_tsv(self) -> str:
        rows = sorted(self.scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return "".join(f"{a}_{b}\t{s!r}\n" for (a, b), s in rows)

    def apply(self, tokens: list[str]) -> list[str]:
        out, i, n = [], 0, len(tokens)
        while i < n:
            if i + 1 < n and (tokens[i], tokens[i + 1]) in self.scores:
                out.append(f"{tokens[i]}_{tokens[i + 1]}")
                i += 2
            else:
                out.append(tokens[i])
                i += 1
        return out


def detect_bigrams(docs: list[list[str]], min_count: int = 5, threshold: float = 10.0):
    """Find collocations and rewrite them as ``a_b`` tokens.

    A pair is accepted when ``count(a,b) >= min_count`` and
    ``(count(a,b) - min_count) * N / (count(a) * count(b)) >= threshold``
    where N is the total number of tokens in the corpus. Pairs are counted
    within documents only.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    unigrams: Counter = Counter()
    pairs: Counter = Counter()
    for doc in docs:
        unigrams.update(doc)
        pairs.update(zip(doc, doc[1:]))
    total = sum(unigrams.values())
    table = PhraseTable(min_count, threshold)
    for (a, b), c in pairs.items():
        if c < min_count:
            continue
        score = (c - min_count) * total / (unigrams[a] * unigrams[b])
        if score >= threshold:
            table.scores[(a, b)] = score
    return table, [table.apply(doc) for doc in docs]


@dataclass(frozen=True)
class Document:
    tweet_id: str
    tokens: tuple
    country: Optional[str] = None
    brands: frozenset = frozenset()

    def to_dict(self) -> dict:
        return {
            "tweet_id": self.tweet_id,
            "tokens": list(self.tokens),
            "country": self.country,
            "brands": sorted(self.brands),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Document":
        return cls(d["tweet_id"], tuple(d["tokens"]), d.get("country"), frozenset(d.get("brands", ())))


@dataclass
class FilterStats:
    kept: int = 0
    dropped: int = 0


def filter_short(docs: Iterable[Document], stats: FilterStats | None = None,
                 min_tokens: int = MIN_DOC_TOKENS) -> Iterator[Document]:
    """Drop documents with fewer than ``min_tokens`` tokens."""
    stats = stats if stats is not None else FilterStats()
    for doc in docs:
        if len(doc.tokens) < min_tokens:
            stats.dropped += 1
            continue
        stats.kept += 1
        yield doc


@dataclass
class PreprocessResult:
    documents: list
    phrases: PhraseTable
    dropped_short: int


def preprocess_tweets(tweets, lex: Lexicons, min_count: int = 5, threshold: float = 10.0) -> PreprocessResult:
    """Run the full chain over tweets (anything with id/text/country/brands)."""
    tweets = list(tweets)
    token_lists = [tokenize_normalize(strip_entities(t.text), lex) for t in tweets]
    if token_lists:
        phrases, token_lists = detect_bigrams(token_lists, min_count, threshold)
    else:
        phrases = PhraseTable(min_count, threshold)
    docs = (Document(t.id, tuple(toks), t.country, t.brands) for t, toks in zip(tweets, token_lists))
    stats = FilterStats()
    kept = list(filter_short(docs, stats))
    logger.info("preprocess: %d documents kept, %d shorter than %d tokens", stats.kept, stats.dropped, MIN_DOC_TOKENS)
    return PreprocessResult(kept, phrases, stats.dropped)
