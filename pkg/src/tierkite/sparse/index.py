"""On-disk BM25 index: layout, opening, and search.

Layout (little-endian):

    magic "TKSPARSE" | version u32 | flags u32
    doc_count u64 | total_len u64 | k1 f64 | b f64
    doc_lens u32[doc_count]
    term_count u64
    term_ends u64[term_count]        # cumulative ends into the term blob
    blob_len u64 | term blob (utf-8, lexicographically sorted)
    dfs u32[term_count]
    postings_offsets u64[term_count] # into the postings section
    postings: per term, ords u32[df] then tfs u32[df]

Searches read through either a mmap view or a fully heap-loaded buffer;
both paths return identical results.
"""

from __future__ import annotations

import math
import mmap as _mmap
import os
import struct
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from tierkite import kernels
from tierkite.errors import FormatError
from tierkite.text.tokenizer import detect_and_tokenize

MAGIC = b"TKSPARSE"
VERSION = 1
_HEAD = struct.Struct("<8sII")
_META = struct.Struct("<QQdd")

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


@dataclass
class SparseHit:
    chunk_ordinal: int
    score: float


def idf(doc_count: int, df: int) -> float:
    return max(0.0, math.log(1.0 + (doc_count - df + 0.5) / (df + 0.5)))


class SparseIndex:
    def __init__(self, path: Path, use_mmap: bool = True):
        self.path = Path(path)
        self._f = open(self.path, "rb")
        size = os.fstat(self._f.fileno()).st_size
        if size < _HEAD.size + _META.size:
            self._f.close()
            raise FormatError(f"{path}: sparse index too small")
        if use_mmap:
            self._buf: bytes | _mmap.mmap = _mmap.mmap(self._f.fileno(), 0, access=_mmap.ACCESS_READ)
        else:
            self._buf = self._f.read()
        magic, version, _flags = _HEAD.unpack_from(self._buf, 0)
        if magic != MAGIC or version != VERSION:
            self.close()
            raise FormatError(f"{path}: bad sparse index header")
        pos = _HEAD.size
        self.doc_count, self.total_len, self.k1, self.b = _META.unpack_from(self._buf, pos)
        pos += _META.size
        self.doc_lens = np.frombuffer(self._buf, dtype=np.uint32, count=self.doc_count, offset=pos)
        pos += 4 * self.doc_count
        (self.term_count,) = struct.unpack_from("<Q", self._buf, pos)
        pos += 8
        self._term_ends = np.frombuffer(self._buf, dtype=np.uint64, count=self.term_count, offset=pos)
        pos += 8 * self.term_count
        (blob_len,) = struct.unpack_from("<Q", self._buf, pos)
        pos += 8
        self._blob = bytes(self._buf[pos : pos + blob_len])
        pos += blob_len
        self.dfs = np.frombuffer(self._buf, dtype=np.uint32, count=self.term_count, offset=pos)
        pos += 4 * self.term_count
        self._post_offsets = np.frombuffer(self._buf, dtype=np.uint64, count=self.term_count, offset=pos)
        pos += 8 * self.term_count
        self._postings_base = pos
        self.avg_doc_len = (self.total_len / self.doc_count) if self.doc_count else 0.0

    def close(self) -> None:
        # drop frombuffer views before closing the mapping
        self.doc_lens = None
        self._term_ends = None
        self.dfs = None
        self._post_offsets = None
        try:
            if isinstance(self._buf, _mmap.mmap):
                self._buf.close()
        finally:
            self._buf = b""
            self._f.close()

    def term_at(self, i: int) -> bytes:
        start = int(self._term_ends[i - 1]) if i > 0 else 0
        return self._blob[start : int(self._term_ends[i])]

    def find_term(self, term: str) -> int:
        """Index of the term in the sorted lexicon, or -1."""
        key = term.encode("utf-8")
        lo, hi = 0, self.term_count
        while lo < hi:
            mid = (lo + hi) // 2
            if self.term_at(mid) < key:
                lo = mid + 1
            else:
                hi = mid
        if lo < self.term_count and self.term_at(lo) == key:
            return lo
        return -1

    def postings(self, term_index: int) -> tuple[np.ndarray, np.ndarray]:
        df = int(self.dfs[term_index])
        off = self._postings_base + int(self._post_offsets[term_index])
        ords = np.frombuffer(self._buf, dtype=np.uint32, count=df, offset=off)
        tfs = np.frombuffer(self._buf, dtype=np.uint32, count=df, offset=off + 4 * df)
        return ords, tfs

    def lexicon(self) -> dict[str, list[tuple[int, int]]]:
        """Full materialized lexicon (test/debug aid; small corpora only)."""
        out = {}
        for i in range(self.term_count):
            ords, tfs = self.postings(i)
            out[self.term_at(i).decode("utf-8")] = list(zip(ords.tolist(), tfs.tolist()))
        return out


def search_sparse(index: SparseIndex, query: str, k: int, language: str | None = None) -> list[SparseHit]:
    """BM25 top-k; ties break toward the lower chunk ordinal."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if index.doc_count == 0 or not query.strip():
        return []
    stream = detect_and_tokenize(query, language=language)
    terms = list(dict.fromkeys(stream.tokens))  # unique, first-seen order
    scores = np.zeros(index.doc_count, dtype=np.float64)
    touched: list[np.ndarray] = []
    for term in terms:
        ti = index.find_term(term)
        if ti < 0:
            continue
        ords, tfs = index.postings(ti)
        w = idf(index.doc_count, int(index.dfs[ti]))
        contrib = kernels.bm25_block(
            tfs, index.doc_lens[ords], np.float64(w),
            np.float64(index.k1), np.float64(index.b), np.float64(index.avg_doc_len),
        )
        scores[ords] += contrib
        touched.append(ords)
    if not touched:
        return []
    cands = np.unique(np.concatenate(touched))
    cand_scores = scores[cands]
    order = np.lexsort((cands, -cand_scores))[:k]
    return [SparseHit(int(cands[i]), float(cand_scores[i])) for i in order]
