import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from tierkite.errors import EmptyCorpus
from tierkite.ingest import IngestConfig, streaming_ingest
from tierkite.ingest.store import ChunkStore
from conftest import write_corpus


def corpus_with_exact_chunks(tmp_path, n_chunks: int, chunk_size: int = 64):
    """Each doc yields exactly one full-window chunk of distinct tokens."""
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    rng = random.Random(99)
    for i in range(n_chunks):
        tokens = [f"d{i}w{j}x{rng.randrange(10_000)}" for j in range(chunk_size)]
        (corpus / f"c{i:04d}.txt").write_text(" ".join(tokens))
    return corpus


def test_counting_oracle_120_chunks_batch_50(tmp_path):
    corpus = corpus_with_exact_chunks(tmp_path, 120)
    cfg = IngestConfig(shard_dir=tmp_path / "shards", batch_size=50, chunk_size=64, overlap=8)
    res = streaming_ingest(corpus, tmp_path / "store.tkcs", cfg)
    assert [m.chunk_count for m in res.manifests] == [50, 50, 20]
    assert res.store.count == 120
    assert res.max_buffer <= 50


def test_empty_corpus_raises(tmp_path):
    empty = tmp_path / "none"
    empty.mkdir()
    with pytest.raises(EmptyCorpus):
        streaming_ingest(empty, tmp_path / "s.tkcs", IngestConfig(shard_dir=tmp_path / "sh"))


def test_every_surviving_chunk_stored_once(tmp_path):
    corpus = write_corpus(tmp_path / "c", n_docs=8, tokens_per_doc=1500, seed=12)
    cfg = IngestConfig(shard_dir=tmp_path / "sh", batch_size=13)
    res = streaming_ingest(corpus, tmp_path / "s.tkcs", cfg)
    ids = [c.chunk_id for c in res.store.iter_chunks()]
    assert len(ids) == len(set(ids)) == res.chunks_kept


def test_ingest_deterministic(tmp_path):
    corpus = write_corpus(tmp_path / "c", n_docs=5, tokens_per_doc=1200, seed=3)
    r1 = streaming_ingest(corpus, tmp_path / "s1.tkcs", IngestConfig(shard_dir=tmp_path / "sh1"))
    r2 = streaming_ingest(corpus, tmp_path / "s2.tkcs", IngestConfig(shard_dir=tmp_path / "sh2"))
    assert [c.chunk_id for c in r1.store.iter_chunks()] == [c.chunk_id for c in r2.store.iter_chunks()]


def test_crash_between_flushes_leaves_valid_shards_and_old_store(tmp_path):
    corpus = write_corpus(tmp_path / "c", n_docs=6, tokens_per_doc=1500, seed=5)
    old = streaming_ingest(corpus, tmp_path / "store.tkcs", IngestConfig(shard_dir=tmp_path / "sh-old"))
    old_count = old.store.count
    old.store.close()

    calls = {"n": 0}

    def observer(buffer_len: int) -> None:
        calls["n"] += 1
        if calls["n"] == 15:
            raise KeyboardInterrupt("simulated kill")

    cfg = IngestConfig(shard_dir=tmp_path / "sh-new", batch_size=10, buffer_observer=observer)
    with pytest.raises(KeyboardInterrupt):
        streaming_ingest(corpus, tmp_path / "store.tkcs", cfg)

    # completed shards verify
    from tierkite.ingest.store import open_shard

    for shard_path in sorted((tmp_path / "sh-new").glob("*.tks")):
        shard = open_shard(shard_path)
        assert shard.verify_digest()
        shard.close()
    # the previous store is untouched
    survivor = ChunkStore(tmp_path / "store.tkcs")
    assert survivor.count == old_count
    survivor.close()


def test_throttle_sleeps_while_queries_in_flight(tmp_path):
    corpus = corpus_with_exact_chunks(tmp_path, 30)
    cfg = IngestConfig(
        shard_dir=tmp_path / "sh", batch_size=10, chunk_size=64, overlap=8,
        queries_in_flight=lambda: 1, throttle_sleep_s=0.05,
    )
    t0 = time.monotonic()
    streaming_ingest(corpus, tmp_path / "s.tkcs", cfg)
    assert time.monotonic() - t0 >= 3 * 0.05  # one nap per flush


@settings(max_examples=12, deadline=None)
@given(
    n_docs=st.integers(min_value=1, max_value=6),
    tokens=st.integers(min_value=5, max_value=900),
    batch=st.integers(min_value=1, max_value=60),
)
def test_buffer_never_exceeds_batch_size(tmp_path_factory, n_docs, tokens, batch):
    tmp_path = tmp_path_factory.mktemp("buf")
    corpus = write_corpus(tmp_path / "c", n_docs=n_docs, tokens_per_doc=tokens, seed=tokens)
    observed = []
    cfg = IngestConfig(
        shard_dir=tmp_path / "sh", batch_size=batch, chunk_size=128, overlap=16,
        buffer_observer=observed.append,
    )
    res = streaming_ingest(corpus, tmp_path / "s.tkcs", cfg)
    assert res.max_buffer <= batch
    assert max(observed, default=0) <= batch
