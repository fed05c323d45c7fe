import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tierkite.text import language as langdetect
from tierkite.text.tokenizer import (
    TOKEN_SALT,
    detect_and_tokenize,
    lower_codepoints,
    token_hash_array,
    tokenize,
    word_spans,
)


def test_word_spans_recover_tokens():
    text = "Hello, world! It's 2024 -- naïve café_test."
    cp, starts, ends = word_spans(text)
    tokens = [text[s:e] for s, e in zip(starts, ends)]
    assert tokens == ["Hello", "world", "It", "s", "2024", "naïve", "café_test"]


def test_tokenize_lowercases():
    assert tokenize("The Quick BROWN fox") == ["the", "quick", "brown", "fox"]


def test_empty_text_has_no_spans():
    cp, starts, ends = word_spans("")
    assert len(starts) == 0 and len(ends) == 0


def test_detect_and_tokenize_stems_per_language():
    italian = "il gatto e i gatti sono sul tavolo della casa e non sono del cane"
    ts = detect_and_tokenize(italian)
    assert ts.language == "it"
    assert ts.tokens.count("gatt") == 2

    english = "the cats were running and the dogs are running there"
    ts = detect_and_tokenize(english)
    assert ts.language == "en"
    assert "run" in ts.tokens and "cat" in ts.tokens


def test_detect_and_tokenize_explicit_language_override():
    ts = detect_and_tokenize("gatto gatti", language="it")
    assert ts.tokens[0] == ts.tokens[1]


def test_detect_and_tokenize_rejects_empty():
    with pytest.raises(ValueError):
        detect_and_tokenize("")


def test_unknown_language_for_gibberish():
    assert langdetect.detect(["zzq", "bbrt", "kkp"]) == "unknown"


def test_detection_is_deterministic():
    text = "le chat est sur la table avec les livres et il ne dort pas"
    results = {detect_and_tokenize(text).language for _ in range(5)}
    assert results == {"fr"}


def test_token_hashes_match_token_strings():
    text = "alpha beta alpha gamma"
    hashes = token_hash_array(text)
    assert hashes[0] == hashes[2]
    assert len(set(hashes.tolist())) == 3


@settings(max_examples=150, deadline=None)
@given(st.text(min_size=0, max_size=200))
def test_span_tokens_equal_tokenize(text):
    cp, starts, ends = word_spans(text)
    low = lower_codepoints(cp)
    via_spans = [
        low[s:e].astype("<u4").tobytes().decode("utf-32-le") for s, e in zip(starts, ends)
    ]
    assert via_spans == tokenize(text)


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet=st.characters(codec="utf-8"), min_size=0, max_size=120))
def test_spans_cover_only_word_chars(text):
    cp, starts, ends = word_spans(text)
    for s, e in zip(starts, ends):
        assert e > s
        piece = text[s:e]
        assert all(ch.isalnum() or ch == "_" for ch in piece if ord(ch) < 0x10000)
