"""Bounded-buffer streaming ingestion: shards, atomic merge, memory profiling."""

from tierkite.ingest.config import IngestConfig
from tierkite.ingest.store import ChunkStore, ShardManifest, flush_shard, merge_shards
from tierkite.ingest.memory import MemorySample, MemorySampler, memory_report
from tierkite.ingest.ingestor import IngestResult, streaming_ingest

__all__ = [
    "IngestConfig",
    "ChunkStore",
    "ShardManifest",
    "flush_shard",
    "merge_shards",
    "MemorySample",
    "MemorySampler",
    "memory_report",
    "IngestResult",
    "streaming_ingest",
]
