"""Deterministic feature-hashed embeddings.

Each token hashes to one signed coordinate; term counts accumulate and the
vector is L2-normalized. Texts sharing tokens share hashed features, so
near-identical texts have high cosine similarity, and the whole map is a
pure function of (text, spec).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from tierkite import kernels
from tierkite.text.tokenizer import TOKEN_SALT, lower_codepoints, word_spans


@dataclass(frozen=True)
class EmbedderSpec:
    name: str = "hashed-unigram"
    dimension: int = 768
    seed: int = 42


def _seed_mix(spec: EmbedderSpec) -> np.uint64:
    return kernels.splitmix64(np.array([spec.seed], dtype=np.uint64))[0]


def _hash_text_tokens(text: str) -> np.ndarray:
    cp, starts, ends = word_spans(text)
    if len(starts) == 0:
        # tokenless text: fall back to hashing the raw bytes as one feature
        digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
        return np.frombuffer(digest, dtype=np.uint64).copy()
    return kernels.token_hashes(lower_codepoints(cp), starts, ends, TOKEN_SALT)


def embed(text: str, spec: EmbedderSpec = EmbedderSpec()) -> np.ndarray:
    if not text:
        raise ValueError("embed requires non-empty text")
    return embed_batch([text], spec)[0]


def embed_batch(texts: list[str], spec: EmbedderSpec = EmbedderSpec()) -> np.ndarray:
    d = spec.dimension
    out = np.zeros((len(texts), d), dtype=np.float32)
    mix = _seed_mix(spec)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    signs: list[np.ndarray] = []
    with np.errstate(over="ignore"):
        for i, text in enumerate(texts):
            h = kernels.splitmix64(_hash_text_tokens(text) ^ mix)
            cols.append((h % np.uint64(d)).astype(np.int64))
            signs.append(np.where((h >> np.uint64(63)).astype(bool), np.float32(1.0), np.float32(-1.0)))
            rows.append(np.full(len(h), i, dtype=np.int64))
    kernels.scatter_add_signed(
        out, np.concatenate(rows), np.concatenate(cols), np.concatenate(signs)
    )
    norms = np.linalg.norm(out, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return out / norms
