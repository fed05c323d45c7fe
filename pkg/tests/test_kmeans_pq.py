import numpy as np
import pytest

from tierkite.dense.kmeans import assign, kmeans
from tierkite.dense.pq import PQCodebook, decode, encode, train_quantizer
from tierkite.errors import ShapeError, TrainError


def unit(rows):
    rows = np.asarray(rows, dtype=np.float32)
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def test_kmeans_reproduces_well_separated_clusters(rng):
    centers = np.array([[10.0, 0, 0, 0], [0, 10.0, 0, 0], [0, 0, 10.0, 0]], dtype=np.float32)
    pts = np.vstack([c + 0.05 * rng.normal(size=(50, 4)).astype(np.float32) for c in centers])
    got = kmeans(pts, 3, seed=42)
    for c in centers:
        nearest = got[np.argmin(((got - c) ** 2).sum(axis=1))]
        assert np.linalg.norm(nearest - c) < 0.1


def test_kmeans_deterministic(rng):
    X = rng.normal(size=(500, 8)).astype(np.float32)
    assert np.array_equal(kmeans(X, 16, seed=42), kmeans(X, 16, seed=42))
    assert not np.array_equal(kmeans(X, 16, seed=42), kmeans(X, 16, seed=43))


def test_kmeans_insufficient_sample():
    with pytest.raises(TrainError):
        kmeans(np.zeros((3, 4), dtype=np.float32), 8, seed=1)


def test_assign_picks_nearest():
    C = np.array([[0.0, 0.0], [10.0, 10.0]], dtype=np.float32)
    X = np.array([[1.0, 1.0], [9.0, 9.0]], dtype=np.float32)
    assert assign(X, C).tolist() == [0, 1]


# -- product quantization -------------------------------------------------------


def test_code_size_formula_exact(rng):
    X = unit(rng.normal(size=(600, 768)))
    for m, nbits, expected in ((8, 8, 8), (4, 8, 4), (8, 4, 4), (4, 4, 2), (16, 8, 16)):
        cb, _ = train_quantizer(X, m=m, nbits=nbits, nlist=4, seed=1)
        assert cb.code_size == m * nbits // 8 == expected
        codes = encode(X[:5], cb)
        assert codes.shape == (5, expected)
        assert codes.dtype == np.uint8


def test_768_dim_compresses_384x(rng):
    X = unit(rng.normal(size=(300, 768)))
    cb, _ = train_quantizer(X, m=8, nbits=8, nlist=4, seed=42)
    code = encode(X[0], cb)
    raw_bytes = 768 * 4
    assert len(code) == 8
    assert raw_bytes // len(code) == 384


def test_seed_determinism(rng):
    X = unit(rng.normal(size=(512, 64)))
    cb1, coarse1 = train_quantizer(X, m=8, nbits=8, nlist=8, seed=42)
    cb2, coarse2 = train_quantizer(X, m=8, nbits=8, nlist=8, seed=42)
    assert np.array_equal(cb1.centroids, cb2.centroids)
    assert np.array_equal(coarse1, coarse2)


def test_centroid_concatenation_roundtrips_exactly(rng):
    X = unit(rng.normal(size=(400, 32)))
    cb, _ = train_quantizer(X, m=4, nbits=4, nlist=4, seed=7)
    composite = np.concatenate([cb.centroids[j][3] for j in range(4)])
    assert np.array_equal(decode(encode(composite, cb), cb), composite)


def test_exact_reproduction_when_sample_equals_codebook(rng):
    # 2^nbits distinct subvectors per subspace: zero quantization error
    k = 16
    X = rng.normal(size=(k, 8)).astype(np.float32) * 5
    cb, _ = train_quantizer(X, m=2, nbits=4, nlist=2, seed=42)
    rec = decode(encode(X, cb), cb)
    assert np.allclose(rec, X, atol=1e-5)


def test_far_apart_vectors_get_distinct_codes(rng):
    centers = rng.normal(size=(32, 16)).astype(np.float32) * 10
    cb, _ = train_quantizer(centers, m=2, nbits=4, nlist=2, seed=1)
    codes = encode(centers, cb)
    seen = {bytes(c) for c in codes}
    assert len(seen) > 16  # well-separated points rarely collide


def test_reconstruction_error_improves_with_nbits(rng):
    X = unit(rng.normal(size=(2000, 32)))
    errs = {}
    for nbits in (4, 8):
        cb, _ = train_quantizer(X, m=4, nbits=nbits, nlist=4, seed=42)
        rec = decode(encode(X, cb), cb)
        errs[nbits] = float(((X - rec) ** 2).sum(axis=1).mean())
    assert errs[8] < errs[4]


def test_dimension_mismatch_rejected(rng):
    X = unit(rng.normal(size=(300, 32)))
    cb, _ = train_quantizer(X, m=4, nbits=4, nlist=4, seed=1)
    with pytest.raises(ShapeError):
        encode(np.zeros((2, 64), dtype=np.float32), cb)


def test_insufficient_sample_rejected(rng):
    with pytest.raises(TrainError):
        train_quantizer(unit(rng.normal(size=(100, 32))), m=4, nbits=8, nlist=4, seed=1)
    with pytest.raises(ShapeError):
        train_quantizer(unit(rng.normal(size=(300, 30))), m=4, nbits=4, nlist=4, seed=1)
