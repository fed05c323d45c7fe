import string

import pytest
from hypothesis import given, settings, strategies as st

from tierkite.text.stem import stem
from tierkite.text.stem import english, french, german, italian, spanish

LANGS = ("en", "it", "fr", "de", "es")


def test_english_inflections_share_a_stem():
    assert stem("running", "en") == "run"
    assert stem("runs", "en") == "run"
    assert stem("Running".lower(), "en") == stem("RUNS".lower(), "en")


def test_italian_singular_plural_merge():
    assert stem("gatto", "it") == stem("gatti", "it")
    assert stem("abbandonata", "it") == stem("abbandonate", "it")


@pytest.mark.parametrize(
    "word,expected",
    [
        ("relational", "relat"),
        ("conditional", "condit"),
        ("happiness", "happi"),
        ("generously", "generous"),
        ("dying", "die"),
        ("cats", "cat"),
        ("meetings", "meet"),
        ("knitting", "knit"),
    ],
)
def test_english_known_vectors(word, expected):
    assert english.stem(word) == expected


def test_language_specific_merges():
    assert german.stem("katzen") == german.stem("katze")
    assert spanish.stem("gatos") == spanish.stem("gato")
    assert french.stem("continuelle") == french.stem("continuellement")


def test_unsupported_language_falls_back_to_english():
    assert stem("running", "pt") == "run"
    assert stem("running", "unknown") == "run"


@settings(max_examples=400, deadline=None)
@given(
    word=st.text(alphabet=string.ascii_lowercase + "'", min_size=1, max_size=18),
    lang=st.sampled_from(LANGS),
)
def test_stemming_is_idempotent(word, lang):
    once = stem(word, lang)
    assert stem(once, lang) == once


@settings(max_examples=200, deadline=None)
@given(word=st.text(alphabet=string.ascii_lowercase, min_size=1, max_size=14))
def test_stem_never_longer_than_input_plus_one(word):
    # suffix strippers may restore a final 'e' but never grow further
    for lang in LANGS:
        assert len(stem(word, lang)) <= len(word) + 1
