"""Bounded semantic query cache.

A lookup hits when the best cached query vector's cosine similarity
reaches the threshold. Eviction removes the least-recently-hit entry;
inserting counts as a hit. Thread-safe with last-writer-wins inserts.
"""

from __future__ import annotations

import threading
from collections import OrderedDict

import numpy as np

DEFAULT_CAPACITY = 500
DEFAULT_THRESHOLD = 0.92


class SemanticCache:
    def __init__(self, dimension: int, capacity: int = DEFAULT_CAPACITY, threshold: float = DEFAULT_THRESHOLD):
        self.capacity = capacity
        self.threshold = threshold
        self._matrix = np.zeros((capacity, dimension), dtype=np.float32)
        self._lru: OrderedDict[int, object] = OrderedDict()  # slot -> results
        self._free = list(range(capacity - 1, -1, -1))
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._lru)

    def lookup(self, query_vector: np.ndarray):
        """Return cached results or None; a hit refreshes recency."""
        with self._lock:
            if not self._lru:
                self.misses += 1
                return None
            slots = np.fromiter(self._lru.keys(), dtype=np.int64)
            sims = self._matrix[slots] @ np.asarray(query_vector, dtype=np.float32)
            best = int(np.argmax(sims))
            if float(sims[best]) >= self.threshold:
                slot = int(slots[best])
                self._lru.move_to_end(slot)
                self.hits += 1
                return self._lru[slot]
            self.misses += 1
            return None

    def insert(self, query_vector: np.ndarray, results) -> None:
        with self._lock:
            if self._free:
                slot = self._free.pop()
            else:
                slot, _ = self._lru.popitem(last=False)  # least recently hit
            self._matrix[slot] = np.asarray(query_vector, dtype=np.float32)
            self._lru[slot] = results
            self._lru.move_to_end(slot)

    def clear(self) -> None:
        with self._lock:
            self._lru.clear()
            self._free = list(range(self.capacity - 1, -1, -1))
            self.hits = 0
            self.misses = 0

    @property
    def stats(self) -> dict:
        with self._lock:
            return {"size": len(self._lru), "capacity": self.capacity, "hits": self.hits, "misses": self.misses}
