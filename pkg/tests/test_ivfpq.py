import numpy as np
import psutil
import pytest

from tierkite.dense.flat import FlatIndex
from tierkite.dense.ivfpq import ColdIndex, open_cold
from tierkite.dense.pq import train_quantizer
from tierkite.engine.bench import make_clustered_vectors
from tierkite.errors import FormatError


@pytest.fixture(scope="module")
def clustered():
    pts, queries = make_clustered_vectors(n_groups=400, group_size=10, d=64, seed=42)
    cb, coarse = train_quantizer(pts, m=8, nbits=8, nlist=32, seed=42)
    cold = ColdIndex(cb, coarse)
    cold.add(np.arange(len(pts), dtype=np.uint32), pts)
    return pts, queries, cold


def recall_at(cold, flat, queries, nprobe, k=10):
    total = 0.0
    for q in queries:
        exact = set(i for i, _ in flat.search(q, k))
        approx = set(i for i, _ in cold.search(q, k, nprobe=nprobe))
        total += len(exact & approx) / k
    return total / len(queries)


def test_index_containing_only_query_returns_it(rng):
    d = 32
    pts = rng.normal(size=(300, d)).astype(np.float32)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    cb, coarse = train_quantizer(pts, m=4, nbits=4, nlist=4, seed=1)
    cold = ColdIndex(cb, coarse)
    cold.add(np.array([77], dtype=np.uint32), pts[:1])
    hits = cold.search(pts[0], 1, nprobe=4)
    assert hits[0][0] == 77


def test_empty_index_returns_empty(rng):
    pts = rng.normal(size=(300, 32)).astype(np.float32)
    cb, coarse = train_quantizer(pts, m=4, nbits=4, nlist=4, seed=1)
    cold = ColdIndex(cb, coarse)
    assert cold.search(pts[0], 5) == []


def test_recall_monotone_in_probes_at_production_setting(clustered):
    pts, queries, cold = clustered
    flat = FlatIndex(64)
    flat.add(np.arange(len(pts)), pts)
    r_full = recall_at(cold, flat, queries, nprobe=32)
    r_one = recall_at(cold, flat, queries, nprobe=1)
    assert r_full >= r_one
    assert r_full >= 0.9  # nprobe = nlist against the exact oracle


def test_scores_are_cosine_estimates(clustered):
    pts, queries, cold = clustered
    for q in queries[:5]:
        for _id, score in cold.search(q, 5, nprobe=8):
            assert -1.1 <= score <= 1.1


def test_persist_open_roundtrip_identical(tmp_path, clustered):
    pts, queries, cold = clustered
    path = tmp_path / "cold.tkpq"
    cold.persist(path)
    reopened = open_cold(path)
    for q in queries[:10]:
        assert reopened.search(q, 10, nprobe=8) == cold.search(q, 10, nprobe=8)
    reopened.close()


def test_persist_deterministic_bytes(tmp_path, clustered):
    pts, _, cold = clustered
    cold.persist(tmp_path / "a.tkpq")
    cold.persist(tmp_path / "b.tkpq")
    assert (tmp_path / "a.tkpq").read_bytes() == (tmp_path / "b.tkpq").read_bytes()


def test_truncated_file_rejected(tmp_path, clustered):
    pts, _, cold = clustered
    path = tmp_path / "c.tkpq"
    cold.persist(path)
    raw = path.read_bytes()
    for cut in (10, len(raw) // 2):
        (tmp_path / "t.tkpq").write_bytes(raw[:cut])
        with pytest.raises(FormatError):
            open_cold(tmp_path / "t.tkpq")


def test_bad_magic_rejected(tmp_path):
    p = tmp_path / "x.tkpq"
    p.write_bytes(b"WRONGMAG" + b"\x00" * 64)
    with pytest.raises(FormatError):
        open_cold(p)


def test_open_is_lazy_no_index_sized_heap(tmp_path, rng):
    # ~10 MB of codes+ids; opening must not allocate proportionally
    d, n = 64, 400_000
    pts = rng.normal(size=(2000, d)).astype(np.float32)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    cb, coarse = train_quantizer(pts, m=8, nbits=8, nlist=16, seed=1)
    cold = ColdIndex(cb, coarse)
    for lo in range(0, n, 100_000):
        block = np.tile(pts, (50, 1))
        cold.add(np.arange(lo, lo + len(block), dtype=np.uint32), block)
    path = tmp_path / "big.tkpq"
    cold.persist(path)
    assert path.stat().st_size > 4 * 2**20
    rss_before = psutil.Process().memory_info().rss
    handle = open_cold(path)
    rss_after = psutil.Process().memory_info().rss
    assert rss_after - rss_before < 20 * 2**20
    handle.close()


def test_with_appended_copy_on_write(clustered, rng):
    pts, queries, cold = clustered
    before = cold.count
    extra = rng.normal(size=(5, 64)).astype(np.float32)
    extra /= np.linalg.norm(extra, axis=1, keepdims=True)
    new_ids = np.arange(900_000, 900_005, dtype=np.uint32)
    clone = cold.with_appended(new_ids, extra)
    assert cold.count == before            # original untouched
    assert clone.count == before + 5
    got = {i for i, _ in clone.search(extra[0], 3, nprobe=32)}
    assert 900_000 in got
