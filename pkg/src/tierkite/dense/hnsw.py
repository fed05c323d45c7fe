"""Bounded in-memory HNSW graph for the full-precision hot tier.

Standard hierarchical construction: geometric level assignment with factor
1/ln(M), greedy descent through upper layers, beam search of width
ef_construction at and below the node's level, diversity-aware neighbor
selection, pruning to M (2M at layer 0).

Removal uses tombstones; the graph rebuilds itself once tombstones pass a
quarter of the cap. Exceeding ``max_vectors`` live nodes yields a
MigrationRequest naming the oldest ``migration_batch`` ids in insertion
order.
"""

from __future__ import annotations

import heapq
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tierkite.errors import DuplicateId, FormatError, MigrationError, ShapeError

MAGIC = b"TKHOTG01"


@dataclass
class HotGraphConfig:
    dimension: int = 768
    max_vectors: int = 500_000
    M: int = 16
    ef_construction: int = 200
    ef_search: int = 40
    migration_batch: int = 100_000
    seed: int = 42


@dataclass
class MigrationRequest:
    ids: list[int] = field(default_factory=list)


class HotGraph:
    def __init__(self, config: HotGraphConfig):
        if config.M < 2:
            raise ValueError("M must be >= 2")
        self.config = config
        self._ml = 1.0 / math.log(config.M)
        self._rng = np.random.Generator(np.random.PCG64(config.seed))
        cap = max(1024, min(config.max_vectors + config.migration_batch + 1, 1 << 20))
        self._matrix = np.zeros((cap, config.dimension), dtype=np.float32)
        self._n = 0
        self._id_to_node: dict[int, int] = {}
        self._node_to_id: list[int] = []
        self._levels: list[int] = []
        self._neighbors: list[list[list[int]]] = []  # node -> layer -> ids
        self._tombstone: set[int] = set()  # node indexes
        self._entry: int | None = None
        self._max_level = -1
        self._order: list[int] = []  # external ids, insertion order, live only

    # -- basic accessors ----------------------------------------------------

    def __len__(self) -> int:
        return len(self._order)

    @property
    def live_count(self) -> int:
        return len(self._order)

    def ids_present(self) -> list[int]:
        return list(self._order)

    def __contains__(self, vector_id: int) -> bool:
        node = self._id_to_node.get(vector_id)
        return node is not None and node not in self._tombstone

    def vector(self, vector_id: int) -> np.ndarray:
        return self._matrix[self._id_to_node[vector_id]]

    def _scores(self, query: np.ndarray, nodes: list[int]) -> np.ndarray:
        return self._matrix[nodes] @ query

    # -- construction -------------------------------------------------------

    def _random_level(self) -> int:
        u = self._rng.random()
        return int(-math.log(max(u, 1e-12)) * self._ml)

    def _search_layer(
        self, query: np.ndarray, entry_points: list[int], layer: int, ef: int
    ) -> list[tuple[float, int]]:
        """Beam search; returns (cosine-distance, node) ascending."""
        visited = set(entry_points)
        dists = 1.0 - self._scores(query, entry_points)
        candidates: list[tuple[float, int]] = []
        best: list[tuple[float, int]] = []
        for node, dist in zip(entry_points, dists):
            heapq.heappush(candidates, (float(dist), node))
            heapq.heappush(best, (-float(dist), node))
        while candidates:
            dist, node = heapq.heappop(candidates)
            if best and dist > -best[0][0] and len(best) >= ef:
                break
            fresh = [nb for nb in self._neighbors[node][layer] if nb not in visited]
            if not fresh:
                continue
            visited.update(fresh)
            for nb, nd in zip(fresh, 1.0 - self._scores(query, fresh)):
                nd = float(nd)
                if len(best) < ef:
                    heapq.heappush(candidates, (nd, nb))
                    heapq.heappush(best, (-nd, nb))
                elif nd < -best[0][0]:
                    heapq.heappush(candidates, (nd, nb))
                    heapq.heappushpop(best, (-nd, nb))
        out = [(-d, n) for d, n in best]
        out.sort()
        return out

    def _select_neighbors(self, candidates: list[tuple[float, int]], m: int) -> list[int]:
        """Diversity-aware selection: keep candidates closer to the query
        than to any already-selected neighbor; back-fill from the pruned."""
        if len(candidates) <= m:
            return [n for _, n in candidates]
        selected: list[int] = []
        pruned: list[tuple[float, int]] = []
        for dist, node in sorted(candidates):
            if len(selected) >= m:
                break
            if not selected:
                selected.append(node)
                continue
            d_to_sel = 1.0 - self._scores(self._matrix[node], selected)
            if dist < float(d_to_sel.min()):
                selected.append(node)
            else:
                pruned.append((dist, node))
        for dist, node in pruned:
            if len(selected) >= m:
                break
            selected.append(node)
        return selected

    def _link(self, node: int, layer: int, neighbors: list[int]) -> None:
        self._neighbors[node][layer] = list(neighbors)
        cap = self.config.M * 2 if layer == 0 else self.config.M
        for nb in neighbors:
            lst = self._neighbors[nb][layer]
            lst.append(node)
            if len(lst) > cap:
                scored = list(zip(1.0 - self._scores(self._matrix[nb], lst), lst))
                self._neighbors[nb][layer] = self._select_neighbors(
                    [(float(d), n) for d, n in scored], cap
                )

    def insert(self, vector_id: int, v: np.ndarray) -> MigrationRequest | None:
        """Insert one vector; may return a request to migrate the oldest batch."""
        if vector_id in self._id_to_node and self._id_to_node[vector_id] not in self._tombstone:
            raise DuplicateId(f"vector id {vector_id} already in hot tier")
        v = np.asarray(v, dtype=np.float32)
        if v.shape != (self.config.dimension,):
            raise ShapeError(f"expected dim {self.config.dimension}, got {v.shape}")

        node = self._n
        if node >= len(self._matrix):
            grown = np.zeros((len(self._matrix) * 2, self.config.dimension), dtype=np.float32)
            grown[: self._n] = self._matrix[: self._n]
            self._matrix = grown
        self._matrix[node] = v
        self._n += 1
        level = self._random_level()
        self._levels.append(level)
        self._neighbors.append([[] for _ in range(level + 1)])
        self._id_to_node[vector_id] = node
        self._node_to_id.append(vector_id)
        self._order.append(vector_id)

        if self._entry is None:
            self._entry = node
            self._max_level = level
        else:
            ep = [self._entry]
            for layer in range(self._max_level, level, -1):
                ep = [self._search_layer(v, ep, layer, 1)[0][1]]
            for layer in range(min(level, self._max_level), -1, -1):
                found = self._search_layer(v, ep, layer, self.config.ef_construction)
                cap = self.config.M * 2 if layer == 0 else self.config.M
                self._link(node, layer, self._select_neighbors(found, cap))
                ep = [n for _, n in found]
            if level > self._max_level:
                self._max_level = level
                self._entry = node

        if self.live_count > self.config.max_vectors:
            batch = self._order[: self.config.migration_batch]
            return MigrationRequest(ids=list(batch))
        return None

    # -- search -------------------------------------------------------------

    def search(self, query: np.ndarray, k: int, ef_search: int | None = None) -> list[tuple[int, float]]:
        """Approximate top-k (vector_id, cosine)."""
        if self._entry is None or not self._order:
            return []
        ef = max(ef_search or self.config.ef_search, k)
        query = np.asarray(query, dtype=np.float32)
        ep = [self._entry]
        for layer in range(self._max_level, 0, -1):
            ep = [self._search_layer(query, ep, layer, 1)[0][1]]
        found = self._search_layer(query, ep, 0, max(ef, len(self._tombstone) + k))
        out = []
        for dist, node in found:
            if node in self._tombstone:
                continue
            out.append((self._node_to_id[node], 1.0 - dist))
            if len(out) >= k:
                break
        if len(out) < min(k, self.live_count):
            # beam missed live nodes (tiny or fragmented graph): exact fallback
            live = [self._id_to_node[i] for i in self._order]
            scores = self._scores(query, live)
            order = np.lexsort((np.array([self._node_to_id[n] for n in live]), -scores))[:k]
            out = [(self._node_to_id[live[i]], float(scores[i])) for i in order]
        return out

    # -- removal / migration -------------------------------------------------

    def remove_batch(self, ids: list[int]) -> None:
        """Tombstone a batch; validates every id first so failure removes nothing."""
        nodes = []
        for vector_id in ids:
            node = self._id_to_node.get(vector_id)
            if node is None or node in self._tombstone:
                raise MigrationError(f"id {vector_id} not present in hot tier")
            nodes.append((vector_id, node))
        removing = set(vid for vid, _ in nodes)
        self._order = [i for i in self._order if i not in removing]
        for vector_id, node in nodes:
            self._tombstone.add(node)
            del self._id_to_node[vector_id]
        if len(self._tombstone) > 0.25 * max(self.config.max_vectors, 4):
            self._rebuild()

    def _rebuild(self) -> None:
        survivors = [(vid, self._matrix[self._id_to_node[vid]].copy()) for vid in self._order]
        cfg = self.config
        self._rng = np.random.Generator(np.random.PCG64(cfg.seed + self._n))
        self._matrix = np.zeros((max(1024, len(survivors) + cfg.migration_batch), cfg.dimension), dtype=np.float32)
        self._n = 0
        self._id_to_node = {}
        self._node_to_id = []
        self._levels = []
        self._neighbors = []
        self._tombstone = set()
        self._entry = None
        self._max_level = -1
        self._order = []
        for vid, vec in survivors:
            self.insert(vid, vec)

    # -- snapshot ------------------------------------------------------------

    def save(self, path: Path) -> None:
        """Persist live vectors in insertion order (restart snapshot)."""
        path = Path(path)
        live = [(vid, self._matrix[self._id_to_node[vid]]) for vid in self._order]
        with open(path, "wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<IIQ", 1, self.config.dimension, len(live)))
            if live:
                f.write(np.array([vid for vid, _ in live], dtype=np.int64).tobytes())
                f.write(np.vstack([v for _, v in live]).astype(np.float32).tobytes())

    @classmethod
    def load(cls, path: Path, config: HotGraphConfig) -> "HotGraph":
        path = Path(path)
        raw = path.read_bytes()
        if len(raw) < 8 + 16 or raw[:8] != MAGIC:
            raise FormatError(f"{path}: bad hot snapshot")
        version, dim, count = struct.unpack_from("<IIQ", raw, 8)
        if version != 1 or dim != config.dimension:
            raise FormatError(f"{path}: snapshot dim {dim} != config {config.dimension}")
        pos = 8 + 16
        ids = np.frombuffer(raw, dtype=np.int64, count=count, offset=pos)
        pos += 8 * count
        vecs = np.frombuffer(raw, dtype=np.float32, count=count * dim, offset=pos).reshape(count, dim)
        graph = cls(config)
        for vid, vec in zip(ids, vecs):
            graph.insert(int(vid), vec)
        return graph
