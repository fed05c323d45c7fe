import math
import random

import pytest

from tierkite.ingest.store import flush_shard, merge_shards
from tierkite.sparse import SparseIndex, build_sparse, search_sparse
from tierkite.sparse.index import idf as idf_fn
from tierkite.text.tokenizer import detect_and_tokenize
from conftest import make_chunk


def store_from_texts(tmp_path, texts, lang="en"):
    chunks = [make_chunk(i, t, lang) for i, t in enumerate(texts)]
    manifest = flush_shard(chunks, 0, tmp_path)
    return merge_shards([manifest], tmp_path / "store.tkcs")


def brute_force_bm25(texts, query, k1, b):
    """Independent oracle: per-document term-at-a-time scoring."""
    toks = [detect_and_tokenize(t, language="en").tokens for t in texts]
    n = len(texts)
    avg = sum(len(t) for t in toks) / n
    qterms = list(dict.fromkeys(detect_and_tokenize(query, language="en").tokens))
    scored = {}
    for i, dt in enumerate(toks):
        s = 0.0
        for t in qterms:
            df = sum(1 for d in toks if t in d)
            if df == 0 or t not in dt:
                continue
            w = max(0.0, math.log(1.0 + (n - df + 0.5) / (df + 0.5)))
            tf = float(dt.count(t))
            s += w * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * (float(len(dt)) / avg)))
        if s > 0:
            scored[i] = s
    return sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))


def test_hand_counted_lexicon(tmp_path):
    store = store_from_texts(tmp_path, ["cat cat dog"])
    index = build_sparse(store, tmp_path / "s.tksp")
    lex = index.lexicon()
    assert lex == {"cat": [(0, 2)], "dog": [(0, 1)]}


def test_empty_store_valid_and_returns_nothing(tmp_path):
    store = merge_shards([], tmp_path / "empty.tkcs")
    index = build_sparse(store, tmp_path / "s.tksp")
    assert search_sparse(index, "anything", 5) == []


def test_rebuild_is_byte_identical(tmp_path):
    store = store_from_texts(tmp_path, ["alpha beta gamma", "beta gamma delta", "epsilon"])
    build_sparse(store, tmp_path / "a.tksp")
    build_sparse(store, tmp_path / "b.tksp")
    assert (tmp_path / "a.tksp").read_bytes() == (tmp_path / "b.tksp").read_bytes()


def test_absent_term_returns_empty(tmp_path):
    store = store_from_texts(tmp_path, ["red green blue"])
    index = build_sparse(store, tmp_path / "s.tksp")
    assert search_sparse(index, "zebra", 5) == []


def test_single_doc_with_term_ranks_first(tmp_path):
    store = store_from_texts(tmp_path, ["just one document mentioning kumquat fruit"])
    index = build_sparse(store, tmp_path / "s.tksp")
    hits = search_sparse(index, "kumquat", 5)
    assert hits[0].chunk_ordinal == 0 and hits[0].score > 0


def test_five_doc_toy_corpus_matches_oracle(tmp_path):
    texts = [
        "cat cat dog bird",
        "dog bird bird",
        "cat mouse mouse bird fish",
        "fish fish fish cat dog",
        "bird bird cat dog mouse fish extra words here",
    ]
    store = store_from_texts(tmp_path, texts)
    index = build_sparse(store, tmp_path / "s.tksp")
    for query in ("cat", "cat dog", "mouse fish bird", "dog fish"):
        got = [(h.chunk_ordinal, h.score) for h in search_sparse(index, query, 10, language="en")]
        expected = brute_force_bm25(texts, query, index.k1, index.b)
        assert [g[0] for g in got] == [e[0] for e in expected], query
        for g, e in zip(got, expected):
            assert g[1] == pytest.approx(e[1], abs=1e-12)


def test_oracle_equivalence_random_corpora(tmp_path_factory):
    rng = random.Random(1234)
    for trial in range(3):
        tmp_path = tmp_path_factory.mktemp(f"sparse-{trial}")
        vocab = [f"w{i}" for i in range(60)]
        texts = [
            " ".join(rng.choice(vocab) for _ in range(rng.randint(3, 80)))
            for _ in range(rng.randint(5, 60))
        ]
        store = store_from_texts(tmp_path, texts)
        index = build_sparse(store, tmp_path / "s.tksp")
        for _ in range(8):
            query = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 4)))
            got = [(h.chunk_ordinal, h.score) for h in search_sparse(index, query, len(texts), language="en")]
            expected = brute_force_bm25(texts, query, index.k1, index.b)
            assert [g[0] for g in got] == [e[0] for e in expected]


def test_ties_break_by_ascending_ordinal(tmp_path):
    store = store_from_texts(tmp_path, ["same tokens here", "same tokens here", "other thing"])
    index = build_sparse(store, tmp_path / "s.tksp")
    hits = search_sparse(index, "same tokens", 5)
    assert [h.chunk_ordinal for h in hits][:2] == [0, 1]
    assert hits[0].score == hits[1].score


def test_mmap_and_heap_paths_identical(tmp_path):
    texts = [f"doc {i} shared tail tokens plus unique u{i}" for i in range(25)]
    store = store_from_texts(tmp_path, texts)
    build_sparse(store, tmp_path / "s.tksp")
    via_mmap = SparseIndex(tmp_path / "s.tksp", use_mmap=True)
    via_heap = SparseIndex(tmp_path / "s.tksp", use_mmap=False)
    for q in ("shared tokens", "u7", "doc unique"):
        a = [(h.chunk_ordinal, h.score) for h in search_sparse(via_mmap, q, 30)]
        b = [(h.chunk_ordinal, h.score) for h in search_sparse(via_heap, q, 30)]
        assert a == b
    via_mmap.close()
    via_heap.close()


def test_idf_floor_at_zero():
    assert idf_fn(10, 10) >= 0.0
    assert idf_fn(1, 1) >= 0.0


def test_meta_invariant_avg_doc_len(tmp_path):
    store = store_from_texts(tmp_path, ["three tokens here", "two tokens"])
    index = build_sparse(store, tmp_path / "s.tksp")
    assert index.doc_count == 2
    assert index.avg_doc_len == pytest.approx(2.5)


def test_stemmed_terms_reachable(tmp_path):
    store = store_from_texts(tmp_path, ["the dogs were running happily"])
    index = build_sparse(store, tmp_path / "s.tksp")
    hits = search_sparse(index, "dog run", 5, language="en")
    assert hits and hits[0].chunk_ordinal == 0
