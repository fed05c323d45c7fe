"""Corpus ingestion with a bounded chunk buffer and shard flushing."""

from __future__ import annotations

import ctypes
import gc
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from tierkite.errors import EmptyCorpus
from tierkite.ingest.config import IngestConfig
from tierkite.ingest.memory import MemorySample, MemorySampler
from tierkite.ingest.store import ChunkStore, ShardManifest, flush_shard, merge_shards
from tierkite.text.chunking import Chunk, chunk_id_for, chunk_spans
from tierkite.text.dedup import DedupFilter
from tierkite.text.minhash import signature_from_token_hashes
from tierkite.text.parsing import format_for_path, iter_documents
from tierkite.text.tokenizer import TOKEN_SALT, lower_codepoints, word_spans

from tierkite import kernels

logger = logging.getLogger(__name__)

try:
    _libc = ctypes.CDLL("libc.so.6")
    _libc.malloc_trim.argtypes = [ctypes.c_size_t]
except (OSError, AttributeError):  # non-glibc platform
    _libc = None


def release_buffer_memory() -> None:
    """Post-flush cleanup: sweep young garbage, then return freed pages to
    the OS. A full collection here would scan every tracked object per
    flush; the buffer bound is what matters and gen-0 plus malloc_trim
    keeps the sawtooth."""
    gc.collect(0)
    if _libc is not None:
        _libc.malloc_trim(0)


@dataclass
class IngestResult:
    store: ChunkStore
    samples: list[MemorySample]
    manifests: list[ShardManifest] = field(default_factory=list)
    max_buffer: int = 0
    chunks_kept: int = 0
    chunks_dropped: int = 0
    docs: int = 0
    elapsed_s: float = 0.0


def discover_corpus_files(corpus_dir: Path) -> list[Path]:
    corpus_dir = Path(corpus_dir)
    files = [p for p in sorted(corpus_dir.rglob("*")) if p.is_file() and format_for_path(p)]
    return files


def streaming_ingest(corpus_dir: Path, out: Path, cfg: IngestConfig | None = None) -> IngestResult:
    """Parse, chunk, fingerprint, dedupe, and shard a corpus into a ChunkStore.

    The in-memory buffer never holds more than ``cfg.batch_size`` chunks;
    each flush is followed by a buffer release and allocator trim. A partial
    final batch is flushed, then shards merge atomically into ``out``.
    """
    cfg = cfg or IngestConfig()
    t_start = time.monotonic()
    files = discover_corpus_files(corpus_dir)
    if not files:
        raise EmptyCorpus(f"no parseable files under {corpus_dir}")

    result = IngestResult(store=None, samples=[])  # type: ignore[arg-type]
    shard_dir = Path(cfg.shard_dir)
    buffer: list[Chunk] = []
    shard_id = 0
    dedup = DedupFilter(
        threshold=cfg.dedup_threshold,
        num_permutations=cfg.dedup_permutations,
        bands=cfg.dedup_bands,
        band_capacity=cfg.dedup_band_capacity,
        spill_dir=None,
    )

    sampler: MemorySampler | None = None
    if cfg.profile_memory:
        sampler = MemorySampler(interval_s=cfg.sample_interval_s).start()
        sampler.mark("ingest_start")

    def flush() -> None:
        nonlocal shard_id
        manifest = flush_shard(buffer, shard_id, shard_dir)
        result.manifests.append(manifest)
        shard_id += 1
        buffer.clear()
        release_buffer_memory()
        if sampler is not None:
            sampler.mark("post_flush")
        if cfg.queries_in_flight is not None and cfg.queries_in_flight() > 0:
            time.sleep(cfg.throttle_sleep_s)

    try:
        for path in files:
            for doc in iter_documents(path, text_key=cfg.text_key):
                result.docs += 1
                text = doc.raw_text
                cp, starts, ends = word_spans(text)
                if len(starts) == 0:
                    continue
                hashes = kernels.token_hashes(lower_codepoints(cp), starts, ends, TOKEN_SALT)
                hashes[hashes == 0] = 1
                for t_start_tok, t_end_tok, c_start, c_end in chunk_spans(
                    starts, ends, cfg.chunk_size, cfg.overlap
                ):
                    ctext = text[c_start:c_end]
                    chunk = Chunk(
                        chunk_id=chunk_id_for(doc.doc_id, (t_start_tok, t_end_tok), ctext),
                        doc_id=doc.doc_id,
                        token_span=(t_start_tok, t_end_tok),
                        text=ctext,
                        token_count=t_end_tok - t_start_tok,
                        language=doc.detected_language,
                    )
                    sig = signature_from_token_hashes(
                        hashes[t_start_tok:t_end_tok],
                        cfg.dedup_permutations,
                        cfg.dedup_shingle_width,
                    )
                    if not dedup.offer(chunk, sig):
                        continue
                    buffer.append(chunk)
                    if cfg.buffer_observer is not None:
                        cfg.buffer_observer(len(buffer))
                    result.max_buffer = max(result.max_buffer, len(buffer))
                    if len(buffer) >= cfg.batch_size:
                        flush()
        if buffer:
            flush()
        result.chunks_kept = dedup.kept
        result.chunks_dropped = dedup.dropped
    finally:
        dedup.close()
        if sampler is not None:
            sampler.mark("ingest_end")
            sampler.stop()
            result.samples = sampler.samples()

    result.store = merge_shards(result.manifests, Path(out))
    result.elapsed_s = time.monotonic() - t_start
    logger.info(
        "ingested %d docs -> %d chunks (%d near-duplicates dropped) in %.1fs",
        result.docs, result.chunks_kept, result.chunks_dropped, result.elapsed_s,
    )
    return result
