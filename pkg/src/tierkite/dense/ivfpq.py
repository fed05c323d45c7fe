"""Memory-mapped IVFPQ cold tier.

Vectors are routed to their nearest coarse centroid; each inverted list
stores (uint32 id, packed PQ code) pairs. Queries probe the nprobe nearest
lists and score codes with asymmetric distance: the query stays full
precision and per-subspace dot-product tables turn each code byte into a
cosine-similarity contribution.

File layout:

    magic "TKIVFPQ1" | version u32 | d u32 | m u32 | nbits u32 | nlist u32
    count u64 | seed u64 | trained_on u64
    coarse  f32[nlist, d]
    codebooks f32[m, 2^nbits, d/m]
    directory (offset u64, count u64)[nlist]   # into the lists section
    lists: per list, ids u32[n_i] then codes u8[n_i * code_size]

Opening maps the file; list arrays are zero-copy views that page in
lazily on first touch.
"""

from __future__ import annotations

import mmap as _mmap
import os
import struct
from pathlib import Path

import numpy as np

from tierkite import kernels
from tierkite.dense.kmeans import assign
from tierkite.dense.pq import PQCodebook, pack_ids, unpack_codes, _ids_for
from tierkite.errors import FormatError, ShapeError

MAGIC = b"TKIVFPQ1"
VERSION = 1
_HEAD = struct.Struct("<8sIIIIIQQQ")


class ColdIndex:
    def __init__(self, codebook: PQCodebook, coarse: np.ndarray, seed: int = 42):
        self.codebook = codebook
        self.coarse = np.ascontiguousarray(coarse, dtype=np.float32)
        self.nlist = len(coarse)
        self.seed = seed
        self._coarse_norms = (self.coarse**2).sum(axis=1)
        self._ids: list[np.ndarray] = [np.empty(0, dtype=np.uint32) for _ in range(self.nlist)]
        self._codes: list[np.ndarray] = [
            np.empty((0, codebook.code_size), dtype=np.uint8) for _ in range(self.nlist)
        ]
        self._mmap = None
        self._file = None

    # -- construction ------------------------------------------------------

    @property
    def count(self) -> int:
        return sum(len(ids) for ids in self._ids)

    @property
    def dimension(self) -> int:
        return self.codebook.dimension

    def ids_present(self) -> np.ndarray:
        return np.concatenate(self._ids) if self.nlist else np.empty(0, dtype=np.uint32)

    def add(self, ids: np.ndarray, vectors: np.ndarray) -> None:
        """Encode and append vectors in place (build path; single writer)."""
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        if vectors.ndim != 2 or vectors.shape[1] != self.dimension:
            raise ShapeError(f"expected (n, {self.dimension}) vectors")
        ids = np.asarray(ids, dtype=np.uint32)
        codes = pack_ids(_ids_for(vectors, self.codebook), self.codebook.nbits)
        lists = assign(vectors, self.coarse)
        for lst in np.unique(lists):
            members = lists == lst
            self._ids[lst] = np.concatenate([self._ids[lst], ids[members]])
            self._codes[lst] = np.vstack([self._codes[lst], codes[members]])

    def with_appended(self, ids: np.ndarray, vectors: np.ndarray) -> "ColdIndex":
        """Copy-on-write append: returns a new index sharing untouched lists."""
        clone = ColdIndex(self.codebook, self.coarse, seed=self.seed)
        clone._ids = list(self._ids)
        clone._codes = list(self._codes)
        clone._mmap = None  # views keep the parent mapping alive
        clone._file = self._file
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        ids = np.asarray(ids, dtype=np.uint32)
        codes = pack_ids(_ids_for(vectors, self.codebook), self.codebook.nbits)
        lists = assign(vectors, self.coarse)
        for lst in np.unique(lists):
            members = lists == lst
            clone._ids[lst] = np.concatenate([clone._ids[lst], ids[members]])
            clone._codes[lst] = np.vstack([clone._codes[lst], codes[members]])
        return clone

    # -- search ------------------------------------------------------------

    def _probe_order(self, query: np.ndarray, nprobe: int) -> np.ndarray:
        d2 = self._coarse_norms - 2.0 * (self.coarse @ query)
        nprobe = min(nprobe, self.nlist)
        part = np.argpartition(d2, nprobe - 1)[:nprobe]
        return part[np.argsort(d2[part], kind="stable")]

    def lookup_tables(self, query: np.ndarray) -> np.ndarray:
        """(m, 2^nbits) float32 of query-subvector x centroid dot products."""
        query = np.asarray(query, dtype=np.float32)
        m = self.codebook.m
        dsub = self.dimension // m
        lut = np.empty((m, self.codebook.centroids.shape[1]), dtype=np.float32)
        for j in range(m):
            lut[j] = self.codebook.centroids[j] @ query[j * dsub : (j + 1) * dsub]
        return lut

    def search(self, query: np.ndarray, k: int, nprobe: int = 10) -> list[tuple[int, float]]:
        """Top-k (id, cosine estimate) over the nprobe nearest lists."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if self.count == 0:
            return []
        if len(query) != self.dimension:
            raise ShapeError(f"query dim {len(query)} != {self.dimension}")
        if not 1 <= nprobe:
            raise ValueError("nprobe must be >= 1")
        lut = self.lookup_tables(query)
        cand_ids: list[np.ndarray] = []
        cand_scores: list[np.ndarray] = []
        for lst in self._probe_order(np.asarray(query, dtype=np.float32), nprobe):
            ids = self._ids[lst]
            if len(ids) == 0:
                continue
            unpacked = unpack_codes(self._codes[lst], self.codebook.m, self.codebook.nbits)
            cand_ids.append(ids)
            cand_scores.append(kernels.adc_scan(np.ascontiguousarray(unpacked), lut))
        if not cand_ids:
            return []
        ids = np.concatenate(cand_ids)
        scores = np.concatenate(cand_scores)
        k = min(k, len(ids))
        part = np.argpartition(-scores, k - 1)[:k]
        order = part[np.lexsort((ids[part], -scores[part]))]
        return [(int(ids[i]), float(scores[i])) for i in order]

    # -- persistence -------------------------------------------------------

    def persist(self, path: Path) -> None:
        path = Path(path)
        cb = self.codebook
        with open(path, "wb") as f:
            f.write(
                _HEAD.pack(
                    MAGIC, VERSION, self.dimension, cb.m, cb.nbits, self.nlist,
                    self.count, self.seed, cb.trained_on,
                )
            )
            f.write(self.coarse.tobytes())
            f.write(cb.centroids.tobytes())
            directory = np.zeros((self.nlist, 2), dtype=np.uint64)
            offset = 0
            for i in range(self.nlist):
                n_i = len(self._ids[i])
                directory[i] = (offset, n_i)
                offset += n_i * (4 + cb.code_size)
            f.write(directory.tobytes())
            for i in range(self.nlist):
                f.write(self._ids[i].tobytes())
                f.write(np.ascontiguousarray(self._codes[i]).tobytes())
            f.flush()
            os.fsync(f.fileno())

    def codes_bytes(self) -> int:
        return self.count * self.codebook.code_size

    def close(self) -> None:
        # drop every frombuffer view before closing the mapping
        self._ids = []
        self._codes = []
        self.coarse = None
        self._coarse_norms = None
        self.codebook = None
        if self._mmap is not None:
            self._mmap.close()
            self._mmap = None
        if self._file is not None:
            self._file.close()
            self._file = None


def open_cold(path: Path, use_mmap: bool = True) -> ColdIndex:
    """Open a persisted cold index; list data pages in lazily."""
    path = Path(path)
    f = open(path, "rb")
    size = os.fstat(f.fileno()).st_size
    if size < _HEAD.size:
        f.close()
        raise FormatError(f"{path}: truncated header")
    if use_mmap:
        buf = _mmap.mmap(f.fileno(), 0, access=_mmap.ACCESS_READ)
    else:
        buf = f.read()
    magic, version, d, m, nbits, nlist, count, seed, trained_on = _HEAD.unpack_from(buf, 0)
    if magic != MAGIC or version != VERSION:
        f.close()
        raise FormatError(f"{path}: bad magic or version")
    dsub = d // m
    k = 1 << nbits
    code_size = m * nbits // 8
    pos = _HEAD.size
    need = pos + 4 * nlist * d + 4 * m * k * dsub + 16 * nlist
    if need > size:
        f.close()
        raise FormatError(f"{path}: truncated index sections")
    coarse = np.frombuffer(buf, dtype=np.float32, count=nlist * d, offset=pos).reshape(nlist, d)
    pos += 4 * nlist * d
    centroids = np.frombuffer(buf, dtype=np.float32, count=m * k * dsub, offset=pos).reshape(m, k, dsub)
    pos += 4 * m * k * dsub
    directory = np.frombuffer(buf, dtype=np.uint64, count=nlist * 2, offset=pos).reshape(nlist, 2)
    pos += 16 * nlist
    lists_base = pos
    expected_end = lists_base + sum(int(n) * (4 + code_size) for n in directory[:, 1])
    if expected_end > size:
        f.close()
        raise FormatError(f"{path}: truncated list section")

    index = ColdIndex(
        PQCodebook(m=m, nbits=nbits, centroids=centroids, trained_on=trained_on),
        coarse, seed=seed,
    )
    index._file = f
    index._mmap = buf if use_mmap else None
    ids_list = []
    codes_list = []
    for i in range(nlist):
        off, n_i = int(directory[i, 0]), int(directory[i, 1])
        start = lists_base + off
        ids_list.append(np.frombuffer(buf, dtype=np.uint32, count=n_i, offset=start))
        codes_list.append(
            np.frombuffer(buf, dtype=np.uint8, count=n_i * code_size, offset=start + 4 * n_i).reshape(n_i, code_size)
        )
    index._ids = ids_list
    index._codes = codes_list
    if index.count != count:
        raise FormatError(f"{path}: directory count mismatch")
    return index
