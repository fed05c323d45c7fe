"""Stopword-frequency language detection over en/it/fr/de/es.

Zero-dependency and deterministic: the language whose stopword set matches
the most tokens wins; ties resolve in fixed declaration order; fewer than
two matches means "unknown".
"""

from __future__ import annotations

_STOPWORDS = {
    "en": frozenset(
        "the of and to in a is that it was for on are as with his they at be this have "
        "from or one had by word but not what all were we when your can said there use "
        "an each which she do how their if will up other about out many then them these so".split()
    ),
    "it": frozenset(
        "il lo la i gli le di a da in con su per tra fra e che non si del della dei "
        "delle un uno una sono è al alla ai agli anche come più ma se nel nella questo "
        "questa quello hanno essere sul sulla degli ed o ha".split()
    ),
    "fr": frozenset(
        "le la les de des du un une et est dans pour que qui sur avec ne pas au aux ce "
        "cette ces il elle ils elles nous vous je tu se son sa ses leur mais ou où donc "
        "par plus sont être avoir comme si était".split()
    ),
    "de": frozenset(
        "der die das den dem des ein eine einer eines und oder aber ist sind war waren "
        "nicht mit von zu im in auf für als auch an bei nach wie es ich du er sie wir "
        "ihr sich dass wenn werden wurde kann haben hat sein".split()
    ),
    "es": frozenset(
        "el la los las de del un una unos unas y o que en con por para es son fue eran "
        "no se su sus al lo como más pero si este esta estos estas ese esa aquel entre "
        "sobre también hay ser estar tiene tienen".split()
    ),
}

LANGUAGES = ("en", "it", "fr", "de", "es")
MIN_HITS = 2


def detect(tokens: list[str]) -> str:
    """Return the detected language code, or "unknown"."""
    best_lang = "unknown"
    best_hits = MIN_HITS - 1
    for lang in LANGUAGES:
        words = _STOPWORDS[lang]
        hits = sum(1 for t in tokens if t in words)
        if hits > best_hits:
            best_hits = hits
            best_lang = lang
    return best_lang


def detect_text(text: str) -> str:
    from tierkite.text.tokenizer import tokenize

    return detect(tokenize(text))
