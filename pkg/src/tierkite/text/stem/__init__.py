"""Snowball suffix-stripping stemmers for the five supported languages.

Each language module exposes ``stem(word)`` operating on a lowercase word.
Unsupported languages fall back to English. Results are memoized per
language because stemming dominates index-build token cost otherwise.
"""

from __future__ import annotations

from functools import lru_cache

from tierkite.text.stem import english, french, german, italian, spanish

_STEMMERS = {
    "en": english.stem,
    "it": italian.stem,
    "fr": french.stem,
    "de": german.stem,
    "es": spanish.stem,
}

SUPPORTED = tuple(_STEMMERS)


@lru_cache(maxsize=262144)
def stem(word: str, language: str = "en") -> str:
    """Stem to a fixed point so that stem(stem(w)) == stem(w) for any input.

    Raw suffix stripping can expose a new strippable ending (residual vowel
    rules); one or two extra passes settle it.
    """
    fn = _STEMMERS.get(language, english.stem)
    current = fn(word)
    for _ in range(8):
        following = fn(current)
        if following == current:
            break
        current = following
    return current


def stemmer_for(language: str):
    return _STEMMERS.get(language, english.stem)
