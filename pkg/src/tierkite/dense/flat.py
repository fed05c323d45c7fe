"""Exact full-precision cosine search; the oracle for the quantized tier."""

from __future__ import annotations

import numpy as np


class FlatIndex:
    def __init__(self, dimension: int):
        self.dimension = dimension
        self._vectors = np.empty((0, dimension), dtype=np.float32)
        self._ids = np.empty(0, dtype=np.int64)

    @property
    def count(self) -> int:
        return len(self._ids)

    def add(self, ids: np.ndarray, vectors: np.ndarray) -> None:
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        self._vectors = np.vstack([self._vectors, vectors])
        self._ids = np.concatenate([self._ids, np.asarray(ids, dtype=np.int64)])

    def search(self, query: np.ndarray, k: int) -> list[tuple[int, float]]:
        if self.count == 0:
            return []
        scores = self._vectors @ np.asarray(query, dtype=np.float32)
        k = min(k, self.count)
        part = np.argpartition(-scores, k - 1)[:k]
        order = part[np.lexsort((self._ids[part], -scores[part]))]
        return [(int(self._ids[i]), float(scores[i])) for i in order]
