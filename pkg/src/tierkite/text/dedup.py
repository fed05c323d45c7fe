"""Streaming near-duplicate filter: exact-hash table + banded MinHash LSH.

Memory model: the LSH band tables are preallocated at a fixed capacity and
never grow (newest entry wins a probe-window collision), the exact-duplicate
table grows at ~12 bytes per kept chunk, and full signatures live in a
spill file read back with pread only to verify band candidates. Resident
growth during ingestion is therefore dominated by the small exact table,
not by corpus text or signatures.

Byte-identical chunks always collapse: the exact table is keyed by a
content hash and is never evicted.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from typing import Iterable, Iterator

import numpy as np

from tierkite import kernels
from tierkite.errors import InvalidConfig
from tierkite.text.chunking import Chunk
from tierkite.text.minhash import MinHashSignature

DEFAULT_THRESHOLD = 0.9
DEFAULT_BANDS = 32
DEFAULT_BAND_CAPACITY = 1 << 18
PROBE_WINDOW = 8


def _content_key(text: str) -> np.uint64:
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    key = np.frombuffer(digest, dtype=np.uint64)[0]
    return np.uint64(1) if key == 0 else key


class DedupFilter:
    """Keeps the first occurrence; drops later chunks whose estimated
    Jaccard against a kept chunk reaches the threshold."""

    def __init__(
        self,
        threshold: float = DEFAULT_THRESHOLD,
        num_permutations: int = 128,
        bands: int = DEFAULT_BANDS,
        band_capacity: int = DEFAULT_BAND_CAPACITY,
        spill_dir: str | None = None,
    ):
        if not 0.0 < threshold <= 1.0:
            raise InvalidConfig(f"dedup threshold {threshold} outside (0, 1]")
        if num_permutations % bands != 0:
            raise InvalidConfig("num_permutations must be divisible by bands")
        self.threshold = threshold
        self.num_permutations = num_permutations
        self.bands = bands
        self.rows = num_permutations // bands
        self._sig_bytes = num_permutations * 8
        self._exact = kernels.U64Table(1 << 12)
        rng = np.random.Generator(np.random.PCG64(7))
        self._row_mults = (rng.integers(1, 2**62, self.rows, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
        self._band_salts = kernels.splitmix64(np.arange(bands, dtype=np.uint64))
        self._band_keys = np.zeros((bands, band_capacity), dtype=np.uint64)
        self._band_vals = np.zeros((bands, band_capacity), dtype=np.uint32)
        # commit the pages now: the filter's footprint belongs to the
        # ingest-start baseline, not to per-chunk growth
        self._band_keys[:] = 0
        self._band_vals[:] = 0
        self._spill = tempfile.NamedTemporaryFile(
            prefix="tierkite-sigs-", suffix=".bin", dir=spill_dir, delete=False
        )
        self._spill_fd = self._spill.fileno()
        self.kept = 0
        self.dropped = 0

    @property
    def table_bytes(self) -> int:
        return self._band_keys.nbytes + self._band_vals.nbytes + self._exact.nbytes

    def _band_keys_for(self, sig: MinHashSignature) -> np.ndarray:
        folded = sig.hashes.reshape(self.bands, self.rows)
        with np.errstate(over="ignore"):
            combined = (folded * self._row_mults[None, :]).sum(axis=1, dtype=np.uint64)
            # salt by band index so identical rows in different bands diverge
            keys = kernels.splitmix64(combined ^ self._band_salts)
        keys[keys == 0] = 1
        return np.ascontiguousarray(keys)

    def _stored_signature(self, ordinal: int) -> np.ndarray:
        raw = os.pread(self._spill_fd, self._sig_bytes, ordinal * self._sig_bytes)
        return np.frombuffer(raw, dtype=np.uint64)

    def offer(self, chunk: Chunk, sig: MinHashSignature) -> bool:
        """Return True when the chunk is first-of-its-kind and was kept."""
        key = _content_key(chunk.text)
        if self._exact.find(np.array([key], dtype=np.uint64))[0] != kernels.EMPTY:
            self.dropped += 1
            return False

        band_keys = self._band_keys_for(sig)
        hits = kernels.bands_probe(self._band_keys, self._band_vals, band_keys, PROBE_WINDOW)
        candidates = np.unique(hits[hits != kernels.EMPTY])
        for ordinal in candidates:
            stored = self._stored_signature(int(ordinal))
            estimate = float(np.mean(stored == sig.hashes))
            if estimate >= self.threshold:
                self.dropped += 1
                return False

        ordinal = self.kept
        os.pwrite(self._spill_fd, sig.hashes.tobytes(), ordinal * self._sig_bytes)
        self._exact.insert(np.array([key], dtype=np.uint64), np.array([ordinal], dtype=np.uint32))
        kernels.bands_insert(self._band_keys, self._band_vals, band_keys, np.uint32(ordinal), PROBE_WINDOW)
        self.kept += 1
        return True

    def close(self) -> None:
        try:
            self._spill.close()
        finally:
            try:
                os.unlink(self._spill.name)
            except OSError:
                pass

    def __enter__(self) -> "DedupFilter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def dedup_filter(
    stream: Iterable[tuple[Chunk, MinHashSignature]],
    threshold: float = DEFAULT_THRESHOLD,
    **kwargs,
) -> Iterator[Chunk]:
    """Filter a (chunk, signature) stream down to first occurrences."""
    with DedupFilter(threshold=threshold, **kwargs) as filt:
        for chunk, sig in stream:
            if filt.offer(chunk, sig):
                yield chunk
