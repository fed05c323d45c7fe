"""Shard and chunk-store file format.

Both files share one layout: a magic header, length-prefixed records, a
footer offset index, and a sha-256 digest over the records section:

    [magic 8B] [records...] [offsets u64 x count] [footer]
    footer = offsets_pos u64 | count u64 | digest 32B | magic 8B

Records are written once and never rewritten; merging concatenates the raw
record bytes of verified shards and commits with an atomic rename.
"""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from tierkite.errors import CorruptShard, FormatError
from tierkite.text.chunking import Chunk

SHARD_MAGIC = b"TKSHRD01"
STORE_MAGIC = b"TKSTOR01"
_FOOTER = struct.Struct("<QQ32s8s")

_LANG_CODES = {"en": 0, "it": 1, "fr": 2, "de": 3, "es": 4, "unknown": 5}
_LANG_NAMES = {v: k for k, v in _LANG_CODES.items()}


def pack_chunk(chunk: Chunk) -> bytes:
    cid = chunk.chunk_id.encode("utf-8")
    did = chunk.doc_id.encode("utf-8")
    text = chunk.text.encode("utf-8")
    lang = _LANG_CODES.get(chunk.language, 5)
    body = b"".join(
        (
            struct.pack("<H", len(cid)), cid,
            struct.pack("<H", len(did)), did,
            struct.pack("<IIB", chunk.token_span[0], chunk.token_span[1], lang),
            struct.pack("<I", len(text)), text,
        )
    )
    return struct.pack("<I", len(body)) + body


def unpack_chunk(buf: bytes, offset: int = 0) -> Chunk:
    (body_len,) = struct.unpack_from("<I", buf, offset)
    pos = offset + 4
    (n,) = struct.unpack_from("<H", buf, pos); pos += 2
    cid = buf[pos : pos + n].decode("utf-8"); pos += n
    (n,) = struct.unpack_from("<H", buf, pos); pos += 2
    did = buf[pos : pos + n].decode("utf-8"); pos += n
    s, e, lang = struct.unpack_from("<IIB", buf, pos); pos += 9
    (n,) = struct.unpack_from("<I", buf, pos); pos += 4
    text = buf[pos : pos + n].decode("utf-8")
    return Chunk(
        chunk_id=cid, doc_id=did, token_span=(s, e), text=text,
        token_count=e - s, language=_LANG_NAMES.get(lang, "unknown"),
    )


@dataclass
class ShardManifest:
    shard_id: int
    path: Path
    chunk_count: int
    byte_size: int
    content_digest: str  # hex sha-256 of the records section


def _write_record_file(path: Path, magic: bytes, records: Iterator[bytes]) -> tuple[int, str]:
    """Write the full layout; returns (count, digest). Syncs before returning."""
    digest = hashlib.sha256()
    offsets: list[int] = []
    with open(path, "wb") as f:
        f.write(magic)
        pos = len(magic)
        for rec in records:
            offsets.append(pos)
            f.write(rec)
            digest.update(rec)
            pos += len(rec)
        offsets_pos = pos
        f.write(np.asarray(offsets, dtype=np.uint64).tobytes())
        f.write(_FOOTER.pack(offsets_pos, len(offsets), digest.digest(), magic))
        f.flush()
        os.fsync(f.fileno())
    return len(offsets), digest.hexdigest()


def flush_shard(buffer: Sequence[Chunk], shard_id: int, dir: Path) -> ShardManifest:
    """Durably write one shard; the caller's buffer is left untouched."""
    dir = Path(dir)
    dir.mkdir(parents=True, exist_ok=True)
    path = dir / f"shard-{shard_id:06d}.tks"
    count, digest = _write_record_file(path, SHARD_MAGIC, (pack_chunk(c) for c in buffer))
    return ShardManifest(
        shard_id=shard_id, path=path, chunk_count=count,
        byte_size=path.stat().st_size, content_digest=digest,
    )


class _RecordFile:
    """Random-access reader over the shared record layout."""

    def __init__(self, path: Path, magic: bytes, use_mmap: bool = True):
        self.path = Path(path)
        self._f = open(self.path, "rb")
        size = os.fstat(self._f.fileno()).st_size
        if size < len(magic) + _FOOTER.size:
            self._f.close()
            raise FormatError(f"{path}: file too small")
        head = self._f.read(8)
        if head != magic:
            self._f.close()
            raise FormatError(f"{path}: bad magic {head!r}")
        self._f.seek(size - _FOOTER.size)
        offsets_pos, count, digest, tail_magic = _FOOTER.unpack(self._f.read(_FOOTER.size))
        if tail_magic != magic or offsets_pos + 8 * count > size:
            self._f.close()
            raise FormatError(f"{path}: corrupt footer")
        self.count = count
        self.digest = digest
        self._records_start = len(magic)
        self._records_end = offsets_pos
        if use_mmap:
            import mmap

            self._buf = mmap.mmap(self._f.fileno(), 0, access=mmap.ACCESS_READ)
        else:
            self._f.seek(0)
            self._buf = self._f.read()
        self.offsets = np.frombuffer(
            self._buf[offsets_pos : offsets_pos + 8 * count], dtype=np.uint64
        )

    def record_bytes(self) -> memoryview:
        return memoryview(self._buf)[self._records_start : self._records_end]

    def verify_digest(self) -> bool:
        return hashlib.sha256(self.record_bytes()).digest() == self.digest

    def get(self, ordinal: int) -> Chunk:
        return unpack_chunk(self._buf, int(self.offsets[ordinal]))

    def __iter__(self) -> Iterator[Chunk]:
        for off in self.offsets:
            yield unpack_chunk(self._buf, int(off))

    def close(self) -> None:
        try:
            if hasattr(self._buf, "close"):
                self._buf.close()
        finally:
            self._f.close()


class ChunkStore(_RecordFile):
    """The merged, immutable chunk store."""

    def __init__(self, path: Path, use_mmap: bool = True):
        super().__init__(path, STORE_MAGIC, use_mmap=use_mmap)

    def iter_chunks(self) -> Iterator[Chunk]:
        return iter(self)


def open_shard(path: Path, use_mmap: bool = True) -> _RecordFile:
    return _RecordFile(path, SHARD_MAGIC, use_mmap=use_mmap)


def merge_shards(manifests: Sequence[ShardManifest], out: Path) -> ChunkStore:
    """Verify every shard digest and concatenate records into the store.

    The output becomes visible only via the final rename; a pre-existing
    store at ``out`` stays intact until then.
    """
    out = Path(out)
    tmp = out.with_name(out.name + ".tmp")
    digest = hashlib.sha256()
    offsets: list[np.ndarray] = []
    with open(tmp, "wb") as f:
        f.write(STORE_MAGIC)
        pos = len(STORE_MAGIC)
        total = 0
        for manifest in manifests:
            shard = open_shard(manifest.path)
            try:
                if not shard.verify_digest() or shard.digest.hex() != manifest.content_digest:
                    raise CorruptShard(manifest.shard_id)
                rec = shard.record_bytes()
                try:
                    f.write(rec)
                    digest.update(rec)
                    rec_len = len(rec)
                finally:
                    rec.release()
                shift = pos - shard._records_start
                offsets.append(shard.offsets + np.uint64(shift))
                pos += rec_len
                total += shard.count
            finally:
                shard.close()
        offsets_pos = pos
        all_offsets = (
            np.concatenate(offsets) if offsets else np.empty(0, dtype=np.uint64)
        )
        f.write(all_offsets.tobytes())
        f.write(_FOOTER.pack(offsets_pos, total, digest.digest(), STORE_MAGIC))
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, out)
    _fsync_dir(out.parent)
    return ChunkStore(out)


def _fsync_dir(path: Path) -> None:
    try:
        fd = os.open(path, os.O_RDONLY)
    except OSError:
        return
    try:
        os.fsync(fd)
    except OSError:
        pass
    finally:
        os.close(fd)
