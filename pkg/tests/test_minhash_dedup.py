import numpy as np
import pytest

from tierkite.errors import InvalidConfig
from tierkite.text.dedup import DedupFilter, dedup_filter
from tierkite.text.minhash import minhash_signature, signature_from_token_hashes
from conftest import make_chunk


def sig_of(values) -> "signature_from_token_hashes":
    arr = np.asarray(values, dtype=np.uint64)
    return signature_from_token_hashes(arr, 128, 1)


def exact_jaccard(a: set, b: set) -> float:
    return len(a & b) / len(a | b) if a | b else 1.0


def test_identical_chunks_identical_signatures():
    c = make_chunk(0, "the quick brown fox jumps over the lazy dog repeatedly")
    s1 = minhash_signature(c)
    s2 = minhash_signature(c)
    assert np.array_equal(s1.hashes, s2.hashes)
    assert s1.estimate_jaccard(s2) == 1.0


def test_disjoint_vocabulary_estimates_near_zero():
    a = sig_of(np.arange(1, 300))
    b = sig_of(np.arange(10_000, 10_300))
    # exact Jaccard of the shingle sets is 0
    assert exact_jaccard(set(range(1, 300)), set(range(10_000, 10_300))) == 0.0
    assert a.estimate_jaccard(b) < 0.1


def test_half_overlap_estimate_within_binomial_tolerance():
    # shingle sets with exact Jaccard 0.5: |A∩B| = 200, |A∪B| = 400
    universe = np.arange(1, 401, dtype=np.uint64)
    a_set = universe[:300]
    b_set = universe[100:]
    truth = exact_jaccard(set(a_set.tolist()), set(b_set.tolist()))
    assert truth == 0.5
    est = sig_of(a_set).estimate_jaccard(sig_of(b_set))
    assert abs(est - truth) <= 0.15  # ~3.4 sigma at 128 permutations


def test_minimum_permutations_enforced():
    with pytest.raises(InvalidConfig):
        minhash_signature(make_chunk(0, "some text"), num_permutations=8)
    with pytest.raises(InvalidConfig):
        minhash_signature(make_chunk(0, ""))


def test_signature_length_constant():
    texts = ["alpha beta gamma delta", "one two three four five six seven"]
    lengths = {len(minhash_signature(make_chunk(i, t)).hashes) for i, t in enumerate(texts)}
    assert lengths == {128}


# -- dedup filter -------------------------------------------------------------


def feed(chunks):
    return [(c, minhash_signature(c)) for c in chunks]


def test_exact_duplicate_collapsed():
    a = make_chunk(0, "completely original text about retrieval engines and indexes")
    kept = list(dedup_filter(feed([a, a])))
    assert len(kept) == 1 and kept[0].chunk_id == a.chunk_id


def test_disjoint_chunks_both_kept():
    a = make_chunk(0, "cats sit on warm windowsills every single afternoon")
    b = make_chunk(1, "quantum chromodynamics binds quarks inside hadrons strongly")
    kept = list(dedup_filter(feed([a, b])))
    assert len(kept) == 2


def test_thousand_chunks_hundred_exact_repeats(rng):
    vocab = [f"v{i}" for i in range(800)]
    originals = [
        make_chunk(i, " ".join(vocab[j] for j in rng.integers(0, 800, 40)))
        for i in range(900)
    ]
    repeats = [originals[int(i)] for i in rng.integers(0, 900, 100)]
    stream = originals + repeats
    kept = list(dedup_filter(feed(stream)))
    assert len(kept) == 900


def test_exact_duplicates_collapse_regardless_of_permutation_seed(rng):
    # the exact path is hash-based, not signature-based
    text = " ".join(f"w{i}" for i in rng.integers(0, 50, 64))
    a = make_chunk(0, text)
    for perms in (16, 32, 128):
        filt = DedupFilter(num_permutations=perms, bands=16 if perms == 16 else 32)
        sig = minhash_signature(a, num_permutations=perms)
        assert filt.offer(a, sig) is True
        assert filt.offer(a, sig) is False
        filt.close()


def test_near_duplicate_above_threshold_dropped():
    base_tokens = [f"w{i}" for i in range(200)]
    a = make_chunk(0, " ".join(base_tokens))
    b = make_chunk(1, " ".join(base_tokens[:195] + ["x1", "x2", "x3", "x4", "x5"]))
    kept = list(dedup_filter(feed([a, b]), threshold=0.5))
    assert len(kept) == 1


def test_filter_memory_is_preallocated():
    filt = DedupFilter(band_capacity=1 << 10)
    before = filt.table_bytes
    for i in range(200):
        c = make_chunk(i, f"text number {i} with unique content token{i} extra{i}")
        filt.offer(c, minhash_signature(c))
    # band tables never grow; only the tiny exact table may rehash
    assert filt.table_bytes - before <= (1 << 16) * 12
    filt.close()
