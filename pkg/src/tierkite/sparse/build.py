"""Sparse index construction from a chunk store.

The corpus pass is vectorized: token hashing runs over codepoint arrays
and stemming happens once per (language, surface form) type rather than
per token instance. Postings triples are partitioned by a stable function
of the stem id and spill to disk once a partition outgrows its budget, so
build memory stays bounded for multi-GB corpora. Output bytes are a pure
function of the store: rebuilding an identical store yields a
byte-identical file.
"""

from __future__ import annotations

import struct
import tempfile
from pathlib import Path

import numpy as np

from tierkite import kernels
from tierkite.ingest.store import ChunkStore
from tierkite.sparse.index import DEFAULT_B, DEFAULT_K1, MAGIC, VERSION, SparseIndex
from tierkite.text.stem import stem
from tierkite.text.tokenizer import TOKEN_SALT, lower_codepoints, word_spans

_LANG_SALTS = {
    "en": np.uint64(0xA5A5_0001), "it": np.uint64(0xA5A5_0002),
    "fr": np.uint64(0xA5A5_0003), "de": np.uint64(0xA5A5_0004),
    "es": np.uint64(0xA5A5_0005), "unknown": np.uint64(0xA5A5_0006),
}

N_PARTITIONS = 32
BUFFER_TRIPLES = 8_000_000  # ~96 MB resident before a bulk partition flush


class _TripleSpiller:
    """Accumulates (term, ord, tf) triples and spills them partitioned by
    ``term % N_PARTITIONS`` into count-framed blocks, one file per bucket:
    [u64 n | terms u32*n | ords u32*n | tfs u32*n] per flush."""

    def __init__(self, spill_dir: Path):
        self._dir = Path(spill_dir)
        self._files: list = [None] * N_PARTITIONS
        self.terms: list[np.ndarray] = []
        self.ords: list[np.ndarray] = []
        self.tfs: list[np.ndarray] = []
        self.pending = 0

    def add(self, terms: np.ndarray, ords: np.ndarray, tfs: np.ndarray) -> None:
        self.terms.append(terms)
        self.ords.append(ords)
        self.tfs.append(tfs)
        self.pending += len(terms)
        if self.pending >= BUFFER_TRIPLES:
            self.flush()

    def flush(self) -> None:
        if self.pending == 0:
            return
        terms = np.concatenate(self.terms)
        ords = np.concatenate(self.ords)
        tfs = np.concatenate(self.tfs)
        self.terms, self.ords, self.tfs = [], [], []
        self.pending = 0
        bucket = terms % N_PARTITIONS
        order = np.argsort(bucket, kind="stable")
        terms, ords, tfs, bucket = terms[order], ords[order], tfs[order], bucket[order]
        edges = np.searchsorted(bucket, np.arange(N_PARTITIONS + 1, dtype=np.uint32))
        for p in range(N_PARTITIONS):
            lo, hi = int(edges[p]), int(edges[p + 1])
            if lo == hi:
                continue
            if self._files[p] is None:
                self._files[p] = open(self._dir / f"run-{p:02d}.bin", "w+b")
            f = self._files[p]
            f.write(struct.pack("<Q", hi - lo))
            f.write(terms[lo:hi].tobytes())
            f.write(ords[lo:hi].tobytes())
            f.write(tfs[lo:hi].tobytes())

    def drain(self, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All triples of bucket p, in arrival order."""
        f = self._files[p]
        if f is None:
            empty = np.empty(0, dtype=np.uint32)
            return empty, empty, empty
        t_parts, o_parts, f_parts = [], [], []
        f.seek(0)
        while True:
            head = f.read(8)
            if not head:
                break
            (n,) = struct.unpack("<Q", head)
            block = np.frombuffer(f.read(12 * n), dtype=np.uint32)
            t_parts.append(block[:n])
            o_parts.append(block[n : 2 * n])
            f_parts.append(block[2 * n :])
        f.close()
        self._files[p] = None
        return np.concatenate(t_parts), np.concatenate(o_parts), np.concatenate(f_parts)


def build_sparse(store: ChunkStore, out: Path, k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> SparseIndex:
    out = Path(out)
    doc_count = store.count

    vocab = kernels.U64Table(1 << 14)      # (lang, token-hash) -> dense type id
    type_stem_arr = np.zeros(1 << 12, dtype=np.uint32)  # type id -> stem id
    n_types = 0
    stem_ids: dict[str, int] = {}          # stem string -> stem id
    doc_lens = np.zeros(max(doc_count, 1), dtype=np.uint32)

    with tempfile.TemporaryDirectory(prefix="tksp-build-") as spill_dir:
        spiller = _TripleSpiller(Path(spill_dir))

        for ordinal, chunk in enumerate(store.iter_chunks()):
            cp, starts, ends = word_spans(chunk.text)
            n_tokens = len(starts)
            doc_lens[ordinal] = n_tokens
            if n_tokens == 0:
                continue
            low = lower_codepoints(cp)
            hashes = kernels.token_hashes(low, starts, ends, TOKEN_SALT)
            hashes[hashes == 0] = 1
            lang = chunk.language if chunk.language in _LANG_SALTS else "unknown"
            with np.errstate(over="ignore"):
                keyed = kernels.splitmix64(hashes ^ _LANG_SALTS[lang])
            keyed[keyed == 0] = 1

            uniq_keys, first_pos, counts = np.unique(keyed, return_index=True, return_counts=True)
            type_ids = vocab.find(uniq_keys)
            missing = type_ids == kernels.EMPTY
            if missing.any():
                stem_lang = lang if lang != "unknown" else "en"
                n_new = int(missing.sum())
                if n_types + n_new > len(type_stem_arr):
                    grown = np.zeros(max(len(type_stem_arr) * 2, n_types + n_new), dtype=np.uint32)
                    grown[:n_types] = type_stem_arr[:n_types]
                    type_stem_arr = grown
                new_ids = np.empty(n_new, dtype=np.uint32)
                for j, pos in enumerate(first_pos[missing]):
                    s, e = int(starts[pos]), int(ends[pos])
                    token = low[s:e].astype("<u4").tobytes().decode("utf-32-le")
                    stemmed = stem(token, stem_lang)
                    sid = stem_ids.setdefault(stemmed, len(stem_ids))
                    new_ids[j] = n_types
                    type_stem_arr[n_types] = sid
                    n_types += 1
                vocab.insert(uniq_keys[missing], new_ids)
                type_ids[missing] = new_ids

            term_ids = type_stem_arr[type_ids]
            # distinct surface forms can share a stem: merge their counts
            if len(np.unique(term_ids)) != len(term_ids):
                order = np.argsort(term_ids, kind="stable")
                term_sorted = term_ids[order]
                tf_sorted = counts[order]
                boundaries = np.concatenate(([True], term_sorted[1:] != term_sorted[:-1]))
                term_ids = term_sorted[boundaries]
                tfs = np.add.reduceat(tf_sorted, np.nonzero(boundaries)[0]).astype(np.uint32)
            else:
                tfs = counts.astype(np.uint32)
            ords = np.full(len(term_ids), ordinal, dtype=np.uint32)
            spiller.add(term_ids, ords, tfs)
        spiller.flush()

        # global lexicon order and the old->sorted id remap
        terms_sorted = sorted(stem_ids, key=lambda s: s.encode("utf-8"))
        term_count = len(terms_sorted)
        remap = np.zeros(max(len(stem_ids), 1), dtype=np.uint32)
        for new_id, term in enumerate(terms_sorted):
            remap[stem_ids[term]] = new_id

        dfs = np.zeros(max(term_count, 1), dtype=np.uint32)
        post_offsets = np.zeros(max(term_count, 1), dtype=np.uint64)
        postings_tmp = tempfile.TemporaryFile(dir=spill_dir, prefix="tksp-postings-")
        postings_pos = 0
        for p in range(N_PARTITIONS):
            terms, ords, tfs = spiller.drain(p)
            if len(terms) == 0:
                continue
            terms = remap[terms]
            order = np.lexsort((ords, terms))
            terms, ords, tfs = terms[order], ords[order], tfs[order]
            boundaries = np.concatenate(([0], np.nonzero(terms[1:] != terms[:-1])[0] + 1, [len(terms)]))
            for bi in range(len(boundaries) - 1):
                lo, hi = int(boundaries[bi]), int(boundaries[bi + 1])
                tid = int(terms[lo])
                dfs[tid] = hi - lo
                post_offsets[tid] = postings_pos
                postings_tmp.write(ords[lo:hi].tobytes())
                postings_tmp.write(tfs[lo:hi].tobytes())
                postings_pos += (hi - lo) * 8

        blob = b"".join(t.encode("utf-8") for t in terms_sorted)
        term_ends = (
            np.cumsum([len(t.encode("utf-8")) for t in terms_sorted]).astype(np.uint64)
            if term_count else np.empty(0, dtype=np.uint64)
        )
        with open(out, "wb") as f:
            f.write(struct.pack("<8sII", MAGIC, VERSION, 0))
            f.write(struct.pack("<QQdd", doc_count, int(doc_lens[:doc_count].sum(dtype=np.uint64)), k1, b))
            f.write(doc_lens[:doc_count].tobytes())
            f.write(struct.pack("<Q", term_count))
            f.write(term_ends[:term_count].tobytes())
            f.write(struct.pack("<Q", len(blob)))
            f.write(blob)
            f.write(dfs[:term_count].tobytes())
            f.write(post_offsets[:term_count].tobytes())
            postings_tmp.seek(0)
            while True:
                block = postings_tmp.read(1 << 22)
                if not block:
                    break
                f.write(block)
            f.flush()
        postings_tmp.close()

    return SparseIndex(out)
