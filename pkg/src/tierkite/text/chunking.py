"""Overlapping token-window chunking.

Windows are pure token windows of ``chunk_size`` tokens advancing by
``chunk_size - overlap``; the final window may be shorter. Every token of
the document lands in at least one window.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from tierkite.errors import EmptyDocument, InvalidConfig
from tierkite.text.parsing import Document
from tierkite.text.tokenizer import word_spans

DEFAULT_CHUNK_SIZE = 512
DEFAULT_OVERLAP = 64


@dataclass
class Chunk:
    chunk_id: str
    doc_id: str
    token_span: tuple[int, int]
    text: str
    token_count: int
    language: str = "unknown"


def chunk_id_for(doc_id: str, token_span: tuple[int, int], text: str) -> str:
    h = hashlib.blake2b(digest_size=16)
    h.update(doc_id.encode("utf-8"))
    h.update(f":{token_span[0]}-{token_span[1]}:".encode())
    h.update(text.encode("utf-8"))
    return h.hexdigest()


def window_starts(n_tokens: int, chunk_size: int, overlap: int) -> list[int]:
    if not 0 <= overlap < chunk_size:
        raise InvalidConfig(f"overlap {overlap} must satisfy 0 <= overlap < chunk_size {chunk_size}")
    if n_tokens <= 0:
        return []
    stride = chunk_size - overlap
    starts = [0]
    while starts[-1] + chunk_size < n_tokens:
        starts.append(starts[-1] + stride)
    return starts


def chunk_document(doc: Document, chunk_size: int = DEFAULT_CHUNK_SIZE, overlap: int = DEFAULT_OVERLAP) -> list[Chunk]:
    if not 0 <= overlap < chunk_size:
        raise InvalidConfig(f"overlap {overlap} must satisfy 0 <= overlap < chunk_size {chunk_size}")
    text = doc.raw_text
    _, starts, ends = word_spans(text)
    n = len(starts)
    if n == 0:
        raise EmptyDocument(f"{doc.doc_id}: document has no tokens")
    chunks = []
    for w_start in window_starts(n, chunk_size, overlap):
        w_end = min(w_start + chunk_size, n)
        char_start = int(starts[w_start])
        char_end = int(ends[w_end - 1])
        ctext = text[char_start:char_end]
        chunks.append(
            Chunk(
                chunk_id=chunk_id_for(doc.doc_id, (w_start, w_end), ctext),
                doc_id=doc.doc_id,
                token_span=(w_start, w_end),
                text=ctext,
                token_count=w_end - w_start,
                language=doc.detected_language,
            )
        )
    return chunks


def chunk_spans(starts: np.ndarray, ends: np.ndarray, chunk_size: int, overlap: int) -> list[tuple[int, int, int, int]]:
    """(token_start, token_end, char_start, char_end) per window; array-level twin
    of chunk_document used by the streaming ingestor."""
    n = len(starts)
    out = []
    for w_start in window_starts(n, chunk_size, overlap):
        w_end = min(w_start + chunk_size, n)
        out.append((w_start, w_end, int(starts[w_start]), int(ends[w_end - 1])))
    return out
