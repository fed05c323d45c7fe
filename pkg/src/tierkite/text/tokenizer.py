"""Deterministic word segmentation, language detection, and token streams.

A token is a maximal run of word characters (alphanumeric or underscore),
lowercased. Segmentation is computed over a uint32 codepoint view of the
text so the same boundaries drive chunking, hashing, and embedding without
creating per-token objects on the hot path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tierkite import kernels
from tierkite.text import language as langdetect
from tierkite.text.stem import stem

# BMP classification tables; astral codepoints are treated as non-word.
_TABLE_SIZE = 0x10000
_WORD = np.zeros(_TABLE_SIZE, dtype=bool)
_LOWER = np.arange(_TABLE_SIZE, dtype=np.uint32)
for _i in range(_TABLE_SIZE):
    _c = chr(_i)
    if _c.isalnum() or _c == "_":
        _WORD[_i] = True
        _l = _c.lower()
        if len(_l) == 1:
            _LOWER[_i] = ord(_l)

TOKEN_SALT = np.uint64(0x7469657268617368)


@dataclass
class TokenStream:
    tokens: list[str]
    language: str


def codepoints(text: str) -> np.ndarray:
    return np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32)


def word_spans(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (codepoints, starts, ends) of word-character runs.

    starts/ends index into the codepoint array, which for Python strings is
    also the character index, so ``text[s:e]`` recovers the token.
    """
    cp = codepoints(text)
    if len(cp) == 0:
        empty = np.empty(0, dtype=np.int64)
        return cp, empty, empty
    mask = np.zeros(len(cp) + 2, dtype=bool)
    in_bmp = cp < _TABLE_SIZE
    mask[1:-1][in_bmp] = _WORD[cp[in_bmp]]
    edges = np.diff(mask.astype(np.int8))
    starts = np.nonzero(edges == 1)[0]
    ends = np.nonzero(edges == -1)[0]
    return cp, starts.astype(np.int64), ends.astype(np.int64)


def lower_codepoints(cp: np.ndarray) -> np.ndarray:
    out = cp.copy()
    in_bmp = cp < _TABLE_SIZE
    out[in_bmp] = _LOWER[cp[in_bmp]]
    return out


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens, boundary- and case-identical to the
    vectorized path (lowering goes through the codepoint table)."""
    cp, starts, ends = word_spans(text)
    low = lower_codepoints(cp)
    return [
        low[s:e].astype("<u4").tobytes().decode("utf-32-le")
        for s, e in zip(starts, ends)
    ]


def token_hash_array(text: str, salt: np.uint64 = TOKEN_SALT) -> np.ndarray:
    """uint64 hash per token over lowercased codepoints; 0 is remapped to 1."""
    cp, starts, ends = word_spans(text)
    hashes = kernels.token_hashes(lower_codepoints(cp), starts, ends, salt)
    hashes[hashes == 0] = 1
    return hashes


def detect_and_tokenize(text: str, language: str | None = None) -> TokenStream:
    """Tokenize, detect the language (unless given), and stem every token.

    Unknown languages use English stemming rules.
    """
    if not text:
        raise ValueError("detect_and_tokenize requires non-empty text")
    tokens = tokenize(text)
    lang = language if language is not None else langdetect.detect(tokens)
    stem_lang = lang if lang in ("en", "it", "fr", "de", "es") else "en"
    return TokenStream(tokens=[stem(t, stem_lang) for t in tokens], language=lang)
