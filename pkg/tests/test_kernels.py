"""Numba kernels and numpy fallbacks must agree bit-for-bit."""

import numpy as np
import pytest

from tierkite import kernels


@pytest.fixture()
def gen():
    return np.random.Generator(np.random.PCG64(123))


def test_token_hash_paths_agree(gen):
    cp = gen.integers(32, 1000, 512, dtype=np.uint32)
    starts = np.arange(0, 500, 10, dtype=np.int64)
    ends = starts + gen.integers(1, 9, len(starts), dtype=np.int64)
    a = kernels.token_hashes_np(cp, starts, ends, np.uint64(9))
    if kernels.HAS_NUMBA:
        b = kernels.IMPLS["numba"]["token_hashes"](cp, starts, ends, np.uint64(9))
        assert np.array_equal(a, b)


def test_shingle_and_minhash_paths_agree(gen):
    tok = gen.integers(1, 2**63, 400, dtype=np.uint64)
    a = (gen.integers(1, 2**62, 64, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
    b = gen.integers(0, 2**63, 64, dtype=np.uint64)
    sh_np = kernels.shingle_hashes_np(tok, 5)
    mh_np = kernels.minhash_np(sh_np, a, b)
    if kernels.HAS_NUMBA:
        sh_nb = kernels.IMPLS["numba"]["shingle_hashes"](tok, 5)
        assert np.array_equal(sh_np, sh_nb)
        assert np.array_equal(mh_np, kernels.IMPLS["numba"]["minhash"](sh_nb, a, b))


def test_shingle_shorter_than_width_collapses_to_one(gen):
    tok = gen.integers(1, 2**63, 3, dtype=np.uint64)
    assert len(kernels.shingle_hashes(tok, 5)) == 1


def test_adc_and_bm25_paths_agree(gen):
    codes = gen.integers(0, 256, (300, 8)).astype(np.uint8)
    lut = gen.random((8, 256)).astype(np.float32)
    got = kernels.adc_scan(codes, lut)
    assert np.allclose(got, kernels.adc_scan_np(codes, lut), atol=1e-5)
    tfs = gen.integers(1, 30, 200).astype(np.uint32)
    lens = gen.integers(10, 600, 200).astype(np.uint32)
    a = kernels.bm25_block(tfs, lens, 1.7, 1.2, 0.75, 300.0)
    b = kernels.bm25_block_np(tfs, lens, 1.7, 1.2, 0.75, 300.0)
    assert np.array_equal(a, b)


def test_u64_table_roundtrip_and_growth(gen):
    table = kernels.U64Table(16)
    keys = gen.integers(1, 2**63, 10_000, dtype=np.uint64)
    keys = np.unique(keys)
    vals = np.arange(len(keys), dtype=np.uint32)
    table.insert(keys, vals)
    assert np.array_equal(table.find(keys), vals)
    absent = gen.integers(1, 2**63, 100, dtype=np.uint64)
    absent = absent[~np.isin(absent, keys)]
    assert (table.find(absent) == kernels.EMPTY).all()


def test_u64_table_first_writer_wins():
    table = kernels.U64Table(16)
    k = np.array([42], dtype=np.uint64)
    table.insert(k, np.array([1], dtype=np.uint32))
    table.insert(k, np.array([2], dtype=np.uint32))
    assert table.find(k)[0] == 1


def test_band_tables_probe_and_evict(gen):
    tkeys = np.zeros((4, 64), dtype=np.uint64)
    tvals = np.zeros((4, 64), dtype=np.uint32)
    keys = gen.integers(1, 2**63, 4, dtype=np.uint64)
    kernels.bands_insert(tkeys, tvals, keys, np.uint32(7), 8)
    assert (kernels.bands_probe(tkeys, tvals, keys, 8) == 7).all()
    other = gen.integers(1, 2**63, 4, dtype=np.uint64)
    assert (kernels.bands_probe(tkeys, tvals, other, 8) == kernels.EMPTY).all()
    if kernels.HAS_NUMBA:
        tk2 = np.zeros((4, 64), dtype=np.uint64)
        tv2 = np.zeros((4, 64), dtype=np.uint32)
        kernels.IMPLS["numpy"]["bands_insert"](tk2, tv2, keys, np.uint32(7), 8)
        assert np.array_equal(tkeys, tk2) and np.array_equal(tvals, tv2)


def test_scatter_add_signed_matches_numpy(gen):
    rows = gen.integers(0, 16, 500).astype(np.int64)
    cols = gen.integers(0, 32, 500).astype(np.int64)
    signs = np.where(gen.random(500) > 0.5, 1.0, -1.0).astype(np.float32)
    a = np.zeros((16, 32), dtype=np.float32)
    b = np.zeros((16, 32), dtype=np.float32)
    kernels.scatter_add_signed(a, rows, cols, signs)
    kernels.scatter_add_signed_np(b, rows, cols, signs)
    assert np.allclose(a, b, atol=1e-5)


def test_splitmix64_is_bijective_sample(gen):
    x = gen.integers(0, 2**63, 100_000, dtype=np.uint64)
    x = np.unique(x)
    assert len(np.unique(kernels.splitmix64(x))) == len(x)
