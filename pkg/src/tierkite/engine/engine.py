"""The engine facade: tiered hybrid queries over store + indexes.

Responsibilities: own the global write lock, keep an immutable tier
snapshot (hot graph + cold index) that queries read and writers swap
atomically, run the governor over lazily-loaded components, and drive
the bulk build / incremental add / migration flows.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from tierkite.dense.embedder import EmbedderSpec, embed, embed_batch
from tierkite.dense.flat import FlatIndex
from tierkite.dense.hnsw import HotGraph, HotGraphConfig, MigrationRequest
from tierkite.dense.ivfpq import ColdIndex, open_cold
from tierkite.dense.pq import train_quantizer
from tierkite.engine.config import EngineConfig
from tierkite.engine.governor import Governor, ResourceLedger
from tierkite.engine.locks import Journal, WriteLock
from tierkite.errors import NotReady
from tierkite.fusion.cache import SemanticCache
from tierkite.fusion.qar import CalibrationRecord, compute_adaptive_alpha, qar_adjust
from tierkite.fusion.rrf import (
    CHANNEL_DENSE_COLD,
    CHANNEL_DENSE_HOT,
    ChannelRanking,
    FusedHit,
    fuse_rrf,
    fuse_rrf_weighted,
)
from tierkite.ingest.config import IngestConfig
from tierkite.ingest.ingestor import IngestResult, streaming_ingest
from tierkite.ingest.store import ChunkStore
from tierkite.sparse.build import build_sparse
from tierkite.sparse.index import SparseIndex, search_sparse
from tierkite.text.chunking import Chunk, chunk_document
from tierkite.text.parsing import Document

logger = logging.getLogger(__name__)

EMBEDDER_BYTES_ESTIMATE = 64 * 1024 * 1024  # stands in for a real model's footprint


@dataclass
class QueryStats:
    embed_ms: float = 0.0
    dense_ms: float = 0.0
    sparse_ms: float = 0.0
    fusion_ms: float = 0.0
    total_ms: float = 0.0
    cache_hit: bool = False


@dataclass
class _Tiers:
    """Immutable snapshot readers hold for the duration of one query."""

    hot: HotGraph | None
    cold: ColdIndex | None


def rerank_stub(query_text: str, hits: list[FusedHit]) -> list[FusedHit]:
    """Tier-3 reranking interface; intentionally returns its input unchanged."""
    return hits


class Engine:
    def __init__(self, config: EngineConfig):
        self.config = config
        config.engine_dir.mkdir(parents=True, exist_ok=True)
        self.write_lock = WriteLock()
        self.journal = Journal(config.journal_path)
        self.spec = EmbedderSpec(dimension=config.dimension, seed=config.embedder_seed)
        self.store: ChunkStore | None = None
        self.sparse: SparseIndex | None = None
        self._tiers = _Tiers(hot=None, cold=None)
        self.cache = SemanticCache(
            dimension=config.dimension,
            capacity=config.cache_capacity,
            threshold=config.cache_threshold,
        )
        self.calibration: CalibrationRecord | None = None
        self.ledger = ResourceLedger(ceiling_bytes=config.memory_ceiling_bytes)
        self.governor = Governor(self.ledger, idle_unload_seconds=config.idle_unload_seconds)
        self.ledger.register("embedder", EMBEDDER_BYTES_ESTIMATE, mandatory=False, loader=lambda: self.spec)
        self._queries_in_flight = 0
        self._flight_lock = threading.Lock()
        self._extra_chunks: dict[int, Chunk] = {}
        self._next_ordinal = 0

    # -- lifecycle -----------------------------------------------------------

    def ingest(self, corpus_dir: Path, profile_memory: bool = False, **ingest_kwargs) -> IngestResult:
        cfg = IngestConfig(
            shard_dir=self.config.engine_dir / "shards",
            batch_size=self.config.batch_size,
            profile_memory=profile_memory,
            chunk_size=self.config.chunk_size,
            overlap=self.config.overlap,
            queries_in_flight=self.queries_in_flight,
            **ingest_kwargs,
        )
        with self.write_lock.write("ingest"):
            self.journal.commit({"event": "ingest_start", "corpus": str(corpus_dir)})
            result = streaming_ingest(corpus_dir, self.config.store_path, cfg)
            self.journal.commit(
                {"event": "ingest_done", "chunks": result.chunks_kept, "docs": result.docs}
            )
        return result

    def build_indexes(self, nlist: int | None = None, embed_batch_size: int = 4096) -> None:
        """Bulk-build sparse and cold indexes over the merged store.

        Embedding and encoding stream in batches so build memory stays
        bounded by the batch, the PQ training sample, and the code arrays.
        """
        with self.write_lock.write("index-build"):
            store = ChunkStore(self.config.store_path)
            self.journal.commit({"event": "index_build_start", "chunks": store.count})
            self.sparse = build_sparse(store, self.config.sparse_path)

            nlist = nlist or min(self.config.nlist, max(1, store.count // 16))
            need = max(1 << self.config.pq_nbits, nlist)
            sample_texts: list[str] = []
            for chunk in store.iter_chunks():
                sample_texts.append(chunk.text)
                if len(sample_texts) >= self.config.train_sample:
                    break
            if sample_texts:
                sample = embed_batch(sample_texts, self.spec)
                if len(sample) < need:
                    # tiny corpus: tile the sample; k-means re-seeds empty clusters
                    reps = need // len(sample) + 1
                    sample = np.vstack([sample] * reps)[:need]
            else:
                # empty store still yields a valid (empty) cold index
                rng = np.random.Generator(np.random.PCG64(self.config.embedder_seed))
                sample = rng.normal(size=(need, self.config.dimension)).astype(np.float32)
            del sample_texts
            cb, coarse = train_quantizer(
                sample,
                m=self.config.pq_m,
                nbits=self.config.pq_nbits,
                nlist=nlist,
                seed=self.config.embedder_seed,
            )
            del sample
            cold = ColdIndex(cb, coarse, seed=self.config.embedder_seed)
            batch_texts: list[str] = []
            batch_start = 0
            for ordinal, chunk in enumerate(store.iter_chunks()):
                batch_texts.append(chunk.text)
                if len(batch_texts) >= embed_batch_size:
                    cold.add(
                        np.arange(batch_start, ordinal + 1, dtype=np.uint32),
                        embed_batch(batch_texts, self.spec),
                    )
                    batch_start = ordinal + 1
                    batch_texts = []
            if batch_texts:
                cold.add(
                    np.arange(batch_start, store.count, dtype=np.uint32),
                    embed_batch(batch_texts, self.spec),
                )
            cold.persist(self.config.cold_path)
            self._next_ordinal = store.count
            store.close()
            self.journal.commit({"event": "index_build_done"})

    def load(self) -> None:
        self.store = ChunkStore(self.config.store_path)
        self.sparse = SparseIndex(self.config.sparse_path)
        cold = open_cold(self.config.cold_path)
        hot_cfg = HotGraphConfig(
            dimension=self.config.dimension,
            max_vectors=self.config.hot_max_vectors,
            M=self.config.hot_m,
            ef_construction=self.config.hot_ef_construction,
            ef_search=self.config.hot_ef_search,
            migration_batch=self.config.migration_batch,
            seed=self.config.embedder_seed,
        )
        if self.config.hot_path.exists():
            hot = HotGraph.load(self.config.hot_path, hot_cfg)
        else:
            hot = HotGraph(hot_cfg)
        self._tiers = _Tiers(hot=hot, cold=cold)
        self._next_ordinal = max(self._next_ordinal, self.store.count)
        if self.config.calibration_path.exists():
            self.calibration = CalibrationRecord.load(self.config.calibration_path)

    def reopen_cold(self) -> None:
        """Drop and re-map the cold index (cold-start simulation)."""
        old = self._tiers.cold
        fresh = open_cold(self.config.cold_path)
        self._tiers = _Tiers(hot=self._tiers.hot, cold=fresh)
        if old is not None:
            old.close()

    @property
    def ready(self) -> bool:
        return self.sparse is not None and self._tiers.cold is not None

    # -- query path ----------------------------------------------------------

    def queries_in_flight(self) -> int:
        return self._queries_in_flight

    def embed_query(self, text: str) -> np.ndarray:
        spec = self.governor.use("embedder")
        return embed(text, spec)

    def chunk_ref(self, ordinal: int) -> str:
        if self.store is not None and ordinal < self.store.count:
            return self.store.get(ordinal).chunk_id
        chunk = self._extra_chunks.get(ordinal)
        return chunk.chunk_id if chunk else str(ordinal)

    def _dense_ranking(self, tiers: _Tiers, vec: np.ndarray, depth: int) -> ChannelRanking:
        hot_hits = tiers.hot.search(vec, depth) if tiers.hot is not None and len(tiers.hot) else []
        cold_hits = (
            tiers.cold.search(vec, depth, nprobe=self.config.nprobe)
            if tiers.cold is not None and tiers.cold.count
            else []
        )
        merged: dict[int, tuple[float, str]] = {}
        for doc, score in hot_hits:
            merged[doc] = (score, CHANNEL_DENSE_HOT)
        for doc, score in cold_hits:
            prior = merged.get(doc)
            # on a tie the full-precision hot entry wins
            if prior is None or score > prior[0]:
                merged[doc] = (score, CHANNEL_DENSE_COLD)
        ordered = sorted(merged.items(), key=lambda kv: (-kv[1][0], kv[0]))[:depth]
        return ChannelRanking(
            channel="dense",
            hits=[(doc, score) for doc, (score, _src) in ordered],
            sources=[src for _doc, (_s, src) in ordered],
        )

    def hybrid_query(
        self,
        query_text: str,
        k: int = 10,
        alpha_mode: str | None = None,
        use_cache: bool = True,
        channel_depth: int | None = None,
    ) -> tuple[list[FusedHit], QueryStats]:
        if not self.ready:
            raise NotReady("engine indexes not loaded")
        stats = QueryStats()
        t0 = time.perf_counter()
        with self._flight_lock:
            self._queries_in_flight += 1
        try:
            t = time.perf_counter()
            vec = self.embed_query(query_text)
            stats.embed_ms = (time.perf_counter() - t) * 1000

            if use_cache:
                cached = self.cache.lookup(vec)
                if cached is not None:
                    stats.cache_hit = True
                    stats.total_ms = (time.perf_counter() - t0) * 1000
                    return list(cached)[:k], stats

            depth = channel_depth or max(k, 100)
            tiers = self._tiers  # snapshot for this query

            t = time.perf_counter()
            dense = self._dense_ranking(tiers, vec, depth)
            stats.dense_ms = (time.perf_counter() - t) * 1000

            t = time.perf_counter()
            sparse_hits = search_sparse(self.sparse, query_text, depth)
            sparse = ChannelRanking("sparse", [(h.chunk_ordinal, h.score) for h in sparse_hits])
            stats.sparse_ms = (time.perf_counter() - t) * 1000

            t = time.perf_counter()
            mode = alpha_mode or self.config.alpha_mode
            if mode == "adaptive":
                alpha = compute_adaptive_alpha(self.calibration, self.config.alpha, quantized=True)
                fused = fuse_rrf_weighted(dense, sparse, k=self.config.rrf_k, alpha=alpha)
            elif self.config.alpha != 0.5:
                fused = fuse_rrf_weighted(dense, sparse, k=self.config.rrf_k, alpha=self.config.alpha)
            else:
                fused = fuse_rrf(dense, sparse, k=self.config.rrf_k)
            fused = qar_adjust(fused, self.calibration, mode=self.config.qar_mode)[:k]
            if self.config.reranking_stub:
                fused = rerank_stub(query_text, fused)
            stats.fusion_ms = (time.perf_counter() - t) * 1000

            if use_cache:
                self.cache.insert(vec, list(fused))
            stats.total_ms = (time.perf_counter() - t0) * 1000
            return fused, stats
        finally:
            with self._flight_lock:
                self._queries_in_flight -= 1

    # -- incremental adds and migration ---------------------------------------

    def add_documents(self, docs: list[Document]) -> list[int]:
        """Chunk, embed, and insert into the hot tier; migrates on watermark."""
        ordinals: list[int] = []
        with self.write_lock.write("add-documents"):
            tiers = self._tiers
            if tiers.hot is None:
                raise NotReady("hot tier not loaded")
            for doc in docs:
                for chunk in chunk_document(doc, self.config.chunk_size, self.config.overlap):
                    ordinal = self._next_ordinal
                    self._next_ordinal += 1
                    self._extra_chunks[ordinal] = chunk
                    vec = embed(chunk.text, self.spec)
                    request = tiers.hot.insert(ordinal, vec)
                    ordinals.append(ordinal)
                    if request is not None:
                        self._migrate_locked(request)
        return ordinals

    def _migrate_locked(self, request: MigrationRequest) -> None:
        """Append to cold first, then drop from hot, then swap the snapshot.

        A concurrent reader sees the pre-state or a transiently duplicated
        id (deduped at dense merge), never a gap.
        """
        tiers = self._tiers
        if not request.ids:
            return
        vectors = np.vstack([tiers.hot.vector(i) for i in request.ids])
        new_cold = tiers.cold.with_appended(np.asarray(request.ids, dtype=np.uint32), vectors)
        self._tiers = _Tiers(hot=tiers.hot, cold=new_cold)
        tiers.hot.remove_batch(request.ids)
        self._tiers = _Tiers(hot=tiers.hot, cold=new_cold)
        self.journal.commit({"event": "migrate", "count": len(request.ids)})

    def migrate_to_cold(self, request: MigrationRequest) -> None:
        with self.write_lock.write("migrate"):
            self._migrate_locked(request)

    def searchable_ids(self) -> set[int]:
        tiers = self._tiers
        ids: set[int] = set()
        if tiers.hot is not None:
            ids.update(tiers.hot.ids_present())
        if tiers.cold is not None:
            ids.update(int(i) for i in tiers.cold.ids_present())
        return ids

    @property
    def hot(self) -> HotGraph | None:
        return self._tiers.hot

    @property
    def cold(self) -> ColdIndex | None:
        return self._tiers.cold

    # -- introspection ---------------------------------------------------------

    def stats(self) -> dict:
        tiers = self._tiers
        out = {
            "ledger": self.ledger.snapshot(),
            "cache": self.cache.stats,
            "write_lock_held_by": self.write_lock.holder,
            "store_chunks": self.store.count if self.store else 0,
            "hot_vectors": len(tiers.hot) if tiers.hot else 0,
            "cold_vectors": tiers.cold.count if tiers.cold else 0,
            "sparse_terms": self.sparse.term_count if self.sparse else 0,
            "calibrated": self.calibration is not None,
        }
        for name in ("store_path", "sparse_path", "cold_path"):
            p = getattr(self.config, name)
            out[name.replace("_path", "_bytes")] = p.stat().st_size if p.exists() else 0
        return out

    def flat_index(self) -> FlatIndex:
        """Exact full-precision index over the store (calibration baseline)."""
        store = self.store or ChunkStore(self.config.store_path)
        flat = FlatIndex(self.config.dimension)
        texts = [c.text for c in store.iter_chunks()]
        if texts:
            flat.add(np.arange(len(texts)), embed_batch(texts, self.spec))
        return flat

    def calibrate(self, dev_queries: list[str], k: int = 10) -> CalibrationRecord:
        from tierkite.fusion.qar import calibrate_qar

        flat = self.flat_index()
        cold = self._tiers.cold or open_cold(self.config.cold_path)
        vecs = [embed(q, self.spec) for q in dev_queries]
        record = calibrate_qar(
            flat, cold, vecs, k=k, corpus_id=str(self.config.engine_dir), beta=self.config.qar_beta
        )
        record.save(self.config.calibration_path)
        self.calibration = record
        return record
