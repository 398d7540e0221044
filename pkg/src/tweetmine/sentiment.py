"""Lexicon and rule based sentiment scoring of raw tweet text.

Scores follow the VADER rule set (Hutto & Gilbert, 2014): lexicon valences
adjusted for capitalisation, degree boosters, negation, contrastive "but",
idioms and punctuation emphasis, summed and squashed into a compound score
in (-1, 1).
"""
from __future__ import annotations

import math
import re
import string
from dataclasses import dataclass, field
from enum import Enum

from ._resources import read_lines, read_pairs, resource_path

B_INCR = 0.293
B_DECR = -0.293
C_INCR = 0.733
N_SCALAR = -0.74
EXCLAIM_INCR = 0.292
EXCLAIM_MAX = 4
QUESTION_INCR = 0.18
QUESTION_MAX = 0.96
NORM_ALPHA = 15.0

POSITIVE_THRESHOLD = 0.05
NEGATIVE_THRESHOLD = -0.05


class Polarity(str, Enum):
    POSITIVE = "positive"
    NEUTRAL = "neutral"
    NEGATIVE = "negative"


@dataclass
class SentimentLexicon:
    valences: dict
    boosters: dict
    negations: frozenset
    idioms: dict = field(default_factory=dict)
    emoji_map: dict = field(default_factory=dict)

    def __post_init__(self):
        bad = {w: v for w, v in self.valences.items() if not -4.0 <= v <= 4.0}
        if bad:
            raise ValueError(f"valences outside [-4, 4]: {sorted(bad)[:5]}")
        bad = {w: v for w, v in self.boosters.items() if abs(v) != B_INCR}
        if bad:
            raise ValueError(f"booster increments must be +/-{B_INCR}: {sorted(bad)[:5]}")

    @classmethod
    def load(cls, lexicon=None, boosters=None, negations=None, idioms=None, emoji_map=None) -> "SentimentLexicon":
        return cls(
            valences={w: float(v) for w, v in read_pairs(lexicon or resource_path("vader_lexicon.tsv"))},
            boosters={w.lower(): float(v) for w, v in read_pairs(boosters or resource_path("boosters.tsv"))},
            negations=frozenset(w.strip().lower() for w in read_lines(negations or resource_path("negations.txt"))),
            idioms={p.lower(): float(v) for p, v in read_pairs(idioms or resource_path("idioms.tsv"))},
            emoji_map=dict(read_pairs(emoji_map or resource_path("emoji_map.tsv"))),
        )


_default_lexicon: SentimentLexicon | None = None


def default_lexicon() -> SentimentLexicon:
    global _default_lexicon
    if _default_lexicon is None:
        _default_lexicon = SentimentLexicon.load()
    return _default_lexicon


@dataclass(frozen=True)
class SentimentScore:
    pos: float
    neu: float
    neg: float
    compound: float

    def rounded(self) -> dict:
        """Presentation form: proportions to 3 places, compound to 4."""
        return {
            "pos": round(self.pos, 3),
            "neu": round(self.neu, 3),
            "neg": round(self.neg, 3),
            "compound": round(self.compound, 4),
        }


def normalize(total: float, alpha: float = NORM_ALPHA) -> float:
    value = total / math.sqrt(total * total + alpha)
    return max(-1.0, min(1.0, value))


_PUNCT = string.punctuation


def _strip_punc(token: str) -> str:
    # emoticons such as ":)" would vanish, so short remainders keep the raw token
    stripped = token.strip(_PUNCT)
    return token if len(stripped) <= 2 else stripped


_emoji_cache: dict[int, tuple] = {}


def _emoji_matcher(emoji_map: dict) -> tuple:
    """(pattern over the single-character keys, whether any key is ASCII)."""
    cached = _emoji_cache.get(id(emoji_map))
    if cached is not None and cached[0] is emoji_map:
        return cached[1], cached[2]
    # contiguous code points collapse into ranges; a long literal class is slow to scan
    ranges: list[list[int]] = []
    for cp in sorted(ord(c) for c in emoji_map if len(c) == 1):
        if ranges and cp == ranges[-1][1] + 1:
            ranges[-1][1] = cp
        else:
            ranges.append([cp, cp])
    body = "".join(re.escape(chr(a)) if a == b else f"{re.escape(chr(a))}-{re.escape(chr(b))}" for a, b in ranges)
    pat = re.compile(f"[{body}]") if body else re.compile(r"(?!x)x")
    has_ascii = any(b < 128 for b, _ in ranges)
    _emoji_cache[id(emoji_map)] = (emoji_map, pat, has_ascii)
    return pat, has_ascii


def _translate_emoji(text: str, emoji_map: dict) -> str:
    """Replace each emoji character by its description.

    A description gets a leading space unless it starts the text or follows
    a plain space; consecutive emoji are therefore space separated.
    """
    if not emoji_map:
        return text.strip()
    pat, has_ascii = _emoji_matcher(emoji_map)
    if (text.isascii() and not has_ascii) or pat.search(text) is None:
        return text.strip()

    def repl(m):
        i = m.start()
        desc = emoji_map[m.group()]
        return desc if i == 0 or text[i - 1] == " " else " " + desc

    return pat.sub(repl, text).strip()


def _negated(word: str, negations: frozenset) -> bool:
    return word in negations or "n't" in word


class _Sentence:
    """Tokenised text plus the context the per-word rules look at."""

    __slots__ = ("words", "lower", "cap_diff", "lex")

    def __init__(self, text: str, lex: SentimentLexicon):
        self.words = [_strip_punc(w) for w in text.split()]
        self.lower = [w.lower() for w in self.words]
        n_caps = sum(1 for w in self.words if w.isupper())
        self.cap_diff = 0 < n_caps < len(self.words)
        self.lex = lex

    def booster_shift(self, j: int, valence: float) -> float:
        inc = self.lex.boosters.get(self.lower[j], 0.0)
        if not inc:
            return 0.0
        if valence < 0:
            inc = -inc
        if self.cap_diff and self.words[j].isupper():
            inc += C_INCR if valence > 0 else -C_INCR
        return inc

    def negation_check(self, valence: float, start_i: int, i: int) -> float:
        lw, neg = self.lower, self.lex.negations
        if start_i == 0:
            if _negated(lw[i - 1], neg):
                valence *= N_SCALAR
        elif start_i == 1:
            if lw[i - 2] == "never" and lw[i - 1] in ("so", "this"):
                valence *= 1.25
            elif lw[i - 2] == "without" and lw[i - 1] == "doubt":
                pass
            elif _negated(lw[i - 2], neg):
                valence *= N_SCALAR
        else:
            if (lw[i - 3] == "never" and lw[i - 2] in ("so", "this")) or lw[i - 1] in ("so", "this"):
                valence *= 1.25
            elif lw[i - 3] == "without" and "doubt" in (lw[i - 2], lw[i - 1]):
                pass
            elif _negated(lw[i - 3], neg):
                valence *= N_SCALAR
        return valence

    def idioms_check(self, valence: float, i: int) -> float:
        lw, idioms = self.lower, self.lex.idioms
        onezero = f"{lw[i - 1]} {lw[i]}"
        twoonezero = f"{lw[i - 2]} {lw[i - 1]} {lw[i]}"
        twoone = f"{lw[i - 2]} {lw[i - 1]}"
        threetwoone = f"{lw[i - 3]} {lw[i - 2]} {lw[i - 1]}"
        threetwo = f"{lw[i - 3]} {lw[i - 2]}"
        for seq in (onezero, twoonezero, twoone, threetwoone, threetwo):
            if seq in idioms:
                valence = idioms[seq]
                break
        if len(lw) - 1 > i:
            zeroone = f"{lw[i]} {lw[i + 1]}"
            if zeroone in idioms:
                valence = idioms[zeroone]
        if len(lw) - 1 > i + 1:
            zeroonetwo = f"{lw[i]} {lw[i + 1]} {lw[i + 2]}"
            if zeroonetwo in idioms:
                valence = idioms[zeroonetwo]
        # multi-word dampeners ("kind of", "sort of") preceding the word
        for ngram in (threetwoone, threetwo, twoone):
            if ngram in self.lex.boosters:
                valence += self.lex.boosters[ngram]
        return valence

    def least_check(self, valence: float, i: int) -> float:
        lw, vals = self.lower, self.lex.valences
        if i > 1 and lw[i - 1] == "least" and lw[i - 1] not in vals:
            if lw[i - 2] not in ("at", "very"):
                valence *= N_SCALAR
        elif i > 0 and lw[i - 1] == "least" and lw[i - 1] not in vals:
            valence *= N_SCALAR
        return valence

    def valence(self, i: int) -> float:
        lw, vals = self.lower, self.lex.valences
        base = vals.get(lw[i])
        if base is None:
            return 0.0
        valence = base
        n = len(lw)
        # "no" directly before another lexicon word acts as a negator, not a word
        if lw[i] == "no" and i != n - 1 and lw[i + 1] in vals:
            valence = 0.0
        if (i > 0 and lw[i - 1] == "no") or (i > 1 and lw[i - 2] == "no") or (
            i > 2 and lw[i - 3] == "no" and lw[i - 1] in ("or", "nor")
        ):
            valence = base * N_SCALAR
        if self.cap_diff and self.words[i].isupper():
            valence += C_INCR if valence > 0 else -C_INCR
        for start_i in range(3):
            j = i - start_i - 1
            if j >= 0 and lw[j] not in vals:
                s = self.booster_shift(j, valence)
                if s:
                    if start_i == 1:
                        s *= 0.95
                    elif start_i == 2:
                        s *= 0.9
                valence += s
                valence = self.negation_check(valence, start_i, i)
                if start_i == 2:
                    valence = self.idioms_check(valence, i)
        return self.least_check(valence, i)


def _punctuation_emphasis(text: str) -> float:
    amp = min(text.count("!"), EXCLAIM_MAX) * EXCLAIM_INCR
    q = text.count("?")
    if q > 1:
        amp += q * QUESTION_INCR if q <= 3 else QUESTION_MAX
    return amp


def _but_check(lower: list, sentiments: list) -> list:
    if "but" not in lower:
        return sentiments
    bi = lower.index("but")
    return [s * 0.5 if k < bi else s * 1.5 if k > bi else s for k, s in enumerate(sentiments)]


def score(text: str, lex: SentimentLexicon | None = None) -> SentimentScore:
    """Score raw text; empty or whitespace-only text yields all zeros."""
    lex = lex or default_lexicon()
    text = _translate_emoji(text, lex.emoji_map)
    sent = _Sentence(text, lex)
    lw = sent.lower
    sentiments = []
    for i, w in enumerate(lw):
        if w in lex.boosters or (w == "kind" and i + 1 < len(lw) and lw[i + 1] == "of"):
            sentiments.append(0.0)
        else:
            sentiments.append(sent.valence(i))
    sentiments = _but_check(lw, sentiments)
    if not sentiments:
        return SentimentScore(0.0, 0.0, 0.0, 0.0)

    amp = _punctuation_emphasis(text)
    total = sum(sentiments)
    if total > 0:
        total += amp
    elif total < 0:
        total -= amp
    compound = normalize(total)

    pos_sum = neg_sum = 0.0
    neu_count = 0
    for s in sentiments:
        # +/-1 offsets keep a single weak word from being swamped by neutral counts
        if s > 0:
            pos_sum += s + 1
        elif s < 0:
            neg_sum += s - 1
        else:
            neu_count += 1
    if pos_sum > abs(neg_sum):
        pos_sum += amp
    elif pos_sum < abs(neg_sum):
        neg_sum -= amp
    denom = pos_sum + abs(neg_sum) + neu_count
    return SentimentScore(abs(pos_sum / denom), abs(neu_count / denom), abs(neg_sum / denom), compound)


def classify(sc: SentimentScore | float) -> Polarity:
    """Three-way polarity with inclusive thresholds at +/-0.05."""
    compound = sc.compound if isinstance(sc, SentimentScore) else float(sc)
    if compound >= POSITIVE_THRESHOLD:
        return Polarity.POSITIVE
    if compound <= NEGATIVE_THRESHOLD:
        return Polarity.NEGATIVE
    return Polarity.NEUTRAL


def emotional_words(tokens, lex: SentimentLexicon | None = None) -> list[tuple[str, Polarity]]:
    """Lexicon hits among ``tokens`` tagged with the sign of their valence.

    A merged phrase token such as ``feel_great`` that is not itself in the
    lexicon contributes its lexicon parts (``great``).
    """
    lex = lex or default_lexicon()
    out = []
    for tok in tokens:
        parts = [tok] if tok in lex.valences or "_" not in tok else tok.split("_")
        for part in parts:
            v = lex.valences.get(part)
            if v is None:
                continue
            if v > 0:
                out.append((part, Polarity.POSITIVE))
            elif v < 0:
                out.append((part, Polarity.NEGATIVE))
            else:
                out.append((part, Polarity.NEUTRAL))
    return out


_worker_lex: SentimentLexicon | None = None


def _init_worker(lex: SentimentLexicon) -> None:
    global _worker_lex
    _worker_lex = lex


def _score_chunk(texts: list) -> list:
    return [score(t, _worker_lex) for t in texts]


def score_many(texts, lex: SentimentLexicon | None = None, workers: int = 1, chunk: int = 2000) -> list[SentimentScore]:
    """Score many texts, optionally across ``workers`` processes; order is kept."""
    lex = lex or default_lexicon()
    texts = list(texts)
    if workers <= 1 or len(texts) <= chunk:
        return [score(t, lex) for t in texts]
    from concurrent.futures import ProcessPoolExecutor

    chunks = [texts[i:i + chunk] for i in range(0, len(texts), chunk)]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(lex,)) as pool:
        return [sc for part in pool.map(_score_chunk, chunks) for sc in part]
