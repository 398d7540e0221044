import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from tweetmine.sentiment import (
    Polarity, SentimentLexicon, SentimentScore, _strip_punc, classify, default_lexicon,
    emotional_words, normalize, score,
)

LEX = default_lexicon()

# (text, (pos, neu, neg, compound)) produced by the reference VADER implementation
# run over the bundled lexicon; frozen here as a differential check
REFERENCE = [
    ('The vaccine is not very good, but the staff were extremely kind', (0.299, 0.593, 0.107, 0.6403)),
    ('I am NOT happy about the side effects!!', (0.0, 0.662, 0.338, -0.5547)),
    ('Never so grateful for science', (0.491, 0.509, 0.0, 0.5949)),
    ('kind of worried about the second dose', (0.0, 0.732, 0.268, -0.296)),
    ('At least it was free', (0.452, 0.548, 0.0, 0.5106)),
    ('Not the least bit scared', (0.0, 0.58, 0.42, -0.4404)),
    ('The jab was the bomb', (0.5, 0.5, 0.0, 0.6124)),
    ('Without doubt the best decision', (0.678, 0.322, 0.0, 0.7438)),
    ('Is it safe??? nobody knows????', (0.491, 0.509, 0.0, 0.594)),
    ('Terrible queue, no information, bad management :(', (0.203, 0.214, 0.584, -0.6542)),
    ('Moderna side effects hit me hard', (0.0, 0.781, 0.219, -0.1027)),
    ('Feeling great and very grateful to the health workers 😍', (0.569, 0.431, 0.0, 0.8977)),
    ('no problem at all', (0.429, 0.571, 0.0, 0.3089)),
    ("It isn't horrible", (0.588, 0.412, 0.0, 0.431)),
    ('I hardly felt anything, barely a scratch', (0.0, 1.0, 0.0, 0.0)),
]


@pytest.mark.parametrize("text,expected", REFERENCE)
def test_matches_reference_implementation(text, expected):
    r = score(text).rounded()
    assert (r["pos"], r["neu"], r["neg"], r["compound"]) == pytest.approx(expected, abs=1e-9)


def test_empty_and_blank_text():
    for text in ("", "   ", "\n\t"):
        assert score(text) == SentimentScore(0.0, 0.0, 0.0, 0.0)


def test_no_lexicon_hits_is_neutral():
    sc = score("the queue at the centre")
    assert sc.compound == 0.0 and sc.neu == 1.0


def test_normalize_formula():
    for s in (-7.3, -1.0, 0.0, 0.5, 2.0, 40.0):
        assert normalize(s) == pytest.approx(s / math.sqrt(s * s + 15), abs=1e-15)


def test_caps_emphasis_needs_mixed_case():
    # all-caps text gets no extra emphasis, mixed case does
    assert score("GREAT").compound == score("great").compound
    assert score("GREAT news").compound > score("great news").compound


@pytest.mark.parametrize("text,expected", [
    ("good!!!!", "good!!!!!!!!"),   # capped at four
    ("bad?????", "bad??????????"),  # more than three question marks: flat bonus
])
def test_punctuation_caps(text, expected):
    assert score(text).compound == score(expected).compound


def test_question_marks():
    one, two, three = (score("good" + "?" * n).compound for n in (1, 2, 3))
    assert one == score("good").compound
    assert one < two < three


def test_but_reweights_clauses():
    good, bad = LEX.valences["good"], LEX.valences["bad"]
    assert score("good bad").compound == pytest.approx(normalize(good + bad), abs=1e-15)
    assert score("good but bad").compound == pytest.approx(normalize(0.5 * good + 1.5 * bad), abs=1e-15)


def test_idiom_overrides_valence():
    # idioms are looked up once the word has three tokens of left context
    assert score("the jab was the bomb").compound > 0
    assert score("the jab was a bomb").compound < 0


def test_least_check():
    assert score("least happy").compound < 0
    assert score("at least happy").compound > 0


def test_lexicon_validation():
    with pytest.raises(ValueError, match="valences outside"):
        SentimentLexicon({"x": 4.5}, {}, frozenset())
    with pytest.raises(ValueError, match="booster"):
        SentimentLexicon({"x": 1.0}, {"very": 0.5}, frozenset())


def test_custom_lexicon_file(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("jab\t2.0\n", encoding="utf-8")
    lex = SentimentLexicon.load(lexicon=p)
    assert score("jab", lex).compound == pytest.approx(normalize(2.0))
    assert score("great", lex).compound == 0.0


def test_bundled_lexicon_shape():
    assert 7000 < len(LEX.valences) < 8000
    assert all(-4 <= v <= 4 for v in LEX.valences.values())
    assert all(abs(v) == 0.293 for v in LEX.boosters.values())


@pytest.mark.parametrize("value,label", [
    (-0.0501, Polarity.NEGATIVE), (-0.05, Polarity.NEGATIVE), (-0.0499, Polarity.NEUTRAL),
    (0.0, Polarity.NEUTRAL), (0.0499, Polarity.NEUTRAL), (0.05, Polarity.POSITIVE), (0.0501, Polarity.POSITIVE),
    (0.9469, Polarity.POSITIVE), (-0.5461, Polarity.NEGATIVE),
])
def test_classify_boundaries(value, label):
    assert classify(value) is label
    assert classify(SentimentScore(0, 0, 0, value)) is label


@given(st.floats(min_value=-1, max_value=1, allow_nan=False))
def test_classify_piecewise(c):
    expected = Polarity.POSITIVE if c >= 0.05 else Polarity.NEGATIVE if c <= -0.05 else Polarity.NEUTRAL
    assert classify(c) is expected


def test_emotional_words():
    assert emotional_words(["thank", "dose", "pain"]) == [("thank", Polarity.POSITIVE), ("pain", Polarity.NEGATIVE)]
    assert emotional_words([]) == []
    assert [p for _, p in emotional_words(["effective", "safe"])] == [Polarity.POSITIVE, Polarity.POSITIVE]


def test_emotional_words_split_phrases():
    assert emotional_words(["feel_great", "side_effect"]) == [("great", Polarity.POSITIVE)]
    lex = SentimentLexicon({"side_effect": -1.0}, {}, frozenset())
    assert emotional_words(["side_effect"], lex) == [("side_effect", Polarity.NEGATIVE)]


def test_zero_valence_entry_is_neutral():
    lex = SentimentLexicon({"meh": 0.0}, {}, frozenset())
    assert emotional_words(["meh"], lex) == [("meh", Polarity.NEUTRAL)]


def _reachable(word: str) -> bool:
    # the tokenizer must map the entry back onto itself
    return " " not in word and _strip_punc(word).lower() in LEX.valences


def test_unreachable_entries_are_known():
    unreachable = sorted(w for w in LEX.valences if not _reachable(w))
    assert unreachable == sorted(["( '}{' )", ":-Þ", ":Þ", "^urs", "can't stand", "fed up", "screwed up"])


@settings(max_examples=400, deadline=None)
@given(st.text(max_size=60))
def test_compound_bounded_and_deterministic(text):
    a, b = score(text), score(text)
    assert a == b
    assert -1 < a.compound < 1
    if a.pos or a.neu or a.neg:
        assert a.pos + a.neu + a.neg == pytest.approx(1.0)


def test_compound_bounded_for_extreme_text():
    text = " ".join(["GREAT"] * 300 + ["fine"]) + "!!!!"
    assert score(text).compound < 1


def test_random_word_salad_is_stable():
    rng = random.Random(7)
    words = sorted(LEX.valences)[:2000] + ["not", "but", "very", "never", "so", "kind", "of"]
    for _ in range(300):
        text = " ".join(rng.choice(words) for _ in range(rng.randint(1, 15)))
        c = score(text).compound
        assert -1 < c < 1 and classify(c) is classify(score(text))


def test_score_many_matches_serial():
    texts = [f"{w} vaccine!" for w in sorted(LEX.valences)[:3000]]
    from tweetmine.sentiment import score_many
    assert score_many(texts, workers=2, chunk=1000) == [score(t) for t in texts]
    assert score_many([]) == []
