import pytest

from tierkite.errors import CorruptShard, FormatError
from tierkite.ingest.store import (
    ChunkStore,
    flush_shard,
    merge_shards,
    open_shard,
    pack_chunk,
    unpack_chunk,
)
from conftest import make_chunk


def chunks_of(n, prefix="doc"):
    return [make_chunk(i, f"{prefix} text number {i} with words alpha{i} beta{i}") for i in range(n)]


def test_record_codec_roundtrip():
    c = make_chunk(3, "héllo wörld ütf8 content", lang="de")
    buf = pack_chunk(c)
    back = unpack_chunk(buf)
    assert back.chunk_id == c.chunk_id
    assert back.doc_id == c.doc_id
    assert back.token_span == c.token_span
    assert back.text == c.text
    assert back.language == "de"


def test_flush_shard_manifest_counts(tmp_path):
    manifest = flush_shard(chunks_of(50), 0, tmp_path)
    assert manifest.chunk_count == 50
    assert manifest.byte_size == manifest.path.stat().st_size


def test_shard_rereads_byte_identical_texts(tmp_path):
    original = chunks_of(12)
    manifest = flush_shard(original, 0, tmp_path)
    shard = open_shard(manifest.path)
    read = list(shard)
    assert [c.text for c in read] == [c.text for c in original]
    shard.close()


def test_shard_ids_monotonic(tmp_path):
    m0 = flush_shard(chunks_of(3), 0, tmp_path)
    m1 = flush_shard(chunks_of(3, "other"), 1, tmp_path)
    assert (m0.shard_id, m1.shard_id) == (0, 1)


def test_merge_preserves_order_and_counts(tmp_path):
    a = chunks_of(50, "first")
    b = chunks_of(20, "second")
    m0 = flush_shard(a, 0, tmp_path)
    m1 = flush_shard(b, 1, tmp_path)
    store = merge_shards([m0, m1], tmp_path / "store.tkcs")
    assert store.count == 70
    texts = [c.text for c in store.iter_chunks()]
    assert texts == [c.text for c in a + b]
    assert store.get(50).text == b[0].text
    store.close()


def test_empty_manifest_list_yields_valid_empty_store(tmp_path):
    store = merge_shards([], tmp_path / "empty.tkcs")
    assert store.count == 0
    assert list(store.iter_chunks()) == []
    store.close()


def test_corrupted_shard_detected(tmp_path):
    manifest = flush_shard(chunks_of(5), 0, tmp_path)
    raw = bytearray(manifest.path.read_bytes())
    raw[20] ^= 0xFF  # flip one record byte
    manifest.path.write_bytes(raw)
    with pytest.raises(CorruptShard) as err:
        merge_shards([manifest], tmp_path / "store.tkcs")
    assert err.value.shard_id == 0


def test_merge_is_atomic_over_existing_store(tmp_path):
    good = flush_shard(chunks_of(4), 0, tmp_path)
    out = tmp_path / "store.tkcs"
    store = merge_shards([good], out)
    store.close()
    bad = flush_shard(chunks_of(6, "new"), 1, tmp_path)
    raw = bytearray(bad.path.read_bytes())
    raw[15] ^= 0x55
    bad.path.write_bytes(raw)
    with pytest.raises(CorruptShard):
        merge_shards([good, bad], out)
    survivor = ChunkStore(out)  # previous store intact
    assert survivor.count == 4
    survivor.close()


def test_bad_magic_rejected(tmp_path):
    p = tmp_path / "junk.tkcs"
    p.write_bytes(b"NOTMAGIC" + b"\x00" * 100)
    with pytest.raises(FormatError):
        ChunkStore(p)


def test_truncated_store_rejected(tmp_path):
    m = flush_shard(chunks_of(5), 0, tmp_path)
    store_path = tmp_path / "s.tkcs"
    merge_shards([m], store_path).close()
    raw = store_path.read_bytes()
    (tmp_path / "trunc.tkcs").write_bytes(raw[: len(raw) // 3])
    with pytest.raises(FormatError):
        ChunkStore(tmp_path / "trunc.tkcs")


def test_mmap_and_heap_reads_agree(tmp_path):
    m = flush_shard(chunks_of(9), 0, tmp_path)
    store_path = tmp_path / "s.tkcs"
    merge_shards([m], store_path).close()
    via_mmap = ChunkStore(store_path, use_mmap=True)
    via_heap = ChunkStore(store_path, use_mmap=False)
    assert [c.chunk_id for c in via_mmap] == [c.chunk_id for c in via_heap]
    via_mmap.close()
    via_heap.close()
