import numpy as np
import pytest

from tierkite.dense.hnsw import HotGraph, HotGraphConfig
from tierkite.errors import DuplicateId, MigrationError


def unit_rows(rng, n, d):
    v = rng.normal(size=(n, d)).astype(np.float32)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def small_config(**kw):
    defaults = dict(dimension=32, max_vectors=10_000, M=16, ef_construction=64,
                    ef_search=40, migration_batch=100, seed=1)
    defaults.update(kw)
    return HotGraphConfig(**defaults)


def test_insert_one_and_find_it(rng):
    g = HotGraph(small_config())
    v = unit_rows(rng, 1, 32)[0]
    assert g.insert(5, v) is None
    hits = g.search(v, 1)
    assert hits[0][0] == 5
    assert hits[0][1] == pytest.approx(1.0, abs=1e-5)


def test_duplicate_id_rejected(rng):
    g = HotGraph(small_config())
    v = unit_rows(rng, 2, 32)
    g.insert(1, v[0])
    with pytest.raises(DuplicateId):
        g.insert(1, v[1])


def test_small_graph_is_exact(rng):
    g = HotGraph(small_config())
    vs = unit_rows(rng, 10, 32)
    for i, v in enumerate(vs):
        g.insert(i, v)
    q = unit_rows(rng, 1, 32)[0]
    exact = np.argsort(-(vs @ q))[:5].tolist()
    got = [i for i, _ in g.search(q, 5, ef_search=40)]
    assert set(got) == set(exact)


def test_k_larger_than_count_returns_all(rng):
    g = HotGraph(small_config())
    vs = unit_rows(rng, 7, 32)
    for i, v in enumerate(vs):
        g.insert(i, v)
    assert len(g.search(vs[0], 50)) == 7


def test_migration_request_lists_oldest_batch(rng):
    g = HotGraph(small_config(max_vectors=1000, migration_batch=100))
    vs = unit_rows(rng, 1001, 32)
    order = list(range(1001))
    for i in order[:1000]:
        assert g.insert(i, vs[i]) is None
    request = g.insert(1000, vs[1000])
    assert request is not None
    assert request.ids == order[:100]


def test_remove_batch_atomic_on_missing_id(rng):
    g = HotGraph(small_config())
    vs = unit_rows(rng, 5, 32)
    for i, v in enumerate(vs):
        g.insert(i, v)
    with pytest.raises(MigrationError):
        g.remove_batch([0, 1, 99])
    assert g.live_count == 5  # nothing was removed
    assert 0 in g and 1 in g


def test_remove_then_reinsert_same_id(rng):
    g = HotGraph(small_config())
    vs = unit_rows(rng, 3, 32)
    for i, v in enumerate(vs):
        g.insert(i, v)
    g.remove_batch([1])
    assert 1 not in g
    g.insert(1, vs[1])
    assert 1 in g


def test_tombstone_rebuild_keeps_survivors(rng):
    g = HotGraph(small_config(max_vectors=40, migration_batch=10))
    vs = unit_rows(rng, 40, 32)
    for i, v in enumerate(vs):
        g.insert(i, v)
    g.remove_batch(list(range(15)))  # > 25% of cap triggers a rebuild
    assert g.live_count == 25
    for vid in range(15, 40):
        hits = g.search(vs[vid], 1, ef_search=64)
        assert hits[0][0] == vid


def test_recall_on_10k_random_vectors(rng):
    cfg = small_config(ef_construction=200)
    g = HotGraph(cfg)
    vs = unit_rows(rng, 10_000, 32)
    for i, v in enumerate(vs):
        g.insert(i, v)
    queries = unit_rows(rng, 50, 32)
    total = 0.0
    for q in queries:
        exact = set(np.argsort(-(vs @ q))[:10].tolist())
        got = {i for i, _ in g.search(q, 10, ef_search=64)}
        total += len(exact & got) / 10
    recall = total / len(queries)
    assert recall >= 0.95, f"recall {recall}"


def test_layer0_reachability_after_churn(rng):
    g = HotGraph(small_config(max_vectors=300, migration_batch=40))
    vs = unit_rows(rng, 360, 32)
    inserted = []
    for i in range(360):
        req = g.insert(i, vs[i])
        inserted.append(i)
        if req is not None:
            g.remove_batch(req.ids)
            for gone in req.ids:
                inserted.remove(gone)
    # every live id is reachable by searching for its own vector
    for vid in inserted[:50]:
        found = {i for i, _ in g.search(vs[vid], 5, ef_search=128)}
        assert vid in found


def test_snapshot_roundtrip(tmp_path, rng):
    g = HotGraph(small_config())
    vs = unit_rows(rng, 30, 32)
    for i, v in enumerate(vs):
        g.insert(i, v)
    g.save(tmp_path / "hot.tkhg")
    g2 = HotGraph.load(tmp_path / "hot.tkhg", small_config())
    assert g2.live_count == 30
    assert g2.search(vs[3], 1)[0][0] == 3
