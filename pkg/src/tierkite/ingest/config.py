"""Ingestion configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from tierkite.errors import InvalidConfig


@dataclass
class IngestConfig:
    shard_dir: Path = Path("shards")
    batch_size: int = 50              # chunks per flush
    profile_memory: bool = False
    sample_interval_s: float = 0.1
    chunk_size: int = 512
    overlap: int = 64
    text_key: str = "text"
    dedup_threshold: float = 0.9
    dedup_permutations: int = 128
    dedup_shingle_width: int = 5
    dedup_bands: int = 32
    dedup_band_capacity: int = 1 << 18
    throttle_sleep_s: float = 0.05
    # returns the number of queries in flight; ingestion naps after a flush
    # while it reports > 0
    queries_in_flight: Optional[Callable[[], int]] = None
    # called with the buffer length on every append (test instrumentation)
    buffer_observer: Optional[Callable[[int], None]] = None
    memory_bound_bytes: int = 500 * 1024 * 1024

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise InvalidConfig("batch_size must be >= 1")
        self.shard_dir = Path(self.shard_dir)
