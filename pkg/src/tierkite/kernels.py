"""Hot numeric kernels: numba-jitted with pure-numpy fallbacks.

Every kernel exists twice: a ``*_np`` reference implementation written in
plain numpy/python, and (when numba is importable and not disabled) an
``@njit`` twin compiled from the same arithmetic. The public names bind to
the selected implementation at import time.

Set ``TIERKITE_NUMBA=0`` to force the numpy path. ``IMPLS`` keeps both
variants addressable so the kernel benchmark can compare them.

All hashing is modular uint64 arithmetic; numpy and numba both wrap
silently, so the two paths are bit-identical.
"""

from __future__ import annotations

import os

import numpy as np

_FNV_OFFSET = np.uint64(14695981039346656037)
_FNV_PRIME = np.uint64(1099511628211)
_MIX = np.uint64(0x9E3779B97F4A7C15)
_EMPTY_SLOT = np.uint32(0xFFFFFFFF)

_flag = os.environ.get("TIERKITE_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "off", "false", "no")

try:
    if not NUMBA_REQUESTED:
        raise ImportError("disabled by TIERKITE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # pragma: no cover - trivial shim
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def splitmix64(x: np.ndarray) -> np.ndarray:
    """Finalizing mixer; bijective on uint64."""
    x = np.asarray(x, dtype=np.uint64)
    z = x + _MIX
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------


def token_hashes_np(cp: np.ndarray, starts: np.ndarray, ends: np.ndarray, salt: np.uint64) -> np.ndarray:
    """FNV-1a over the codepoints of each token span."""
    n = len(starts)
    out = np.empty(n, dtype=np.uint64)
    base = _FNV_OFFSET ^ np.uint64(salt)
    cp = cp.astype(np.uint64, copy=False)
    with np.errstate(over="ignore"):
        for i in range(n):
            h = base
            for j in range(starts[i], ends[i]):
                h = (h ^ cp[j]) * _FNV_PRIME
            out[i] = h
    return out


def shingle_hashes_np(token_hashes: np.ndarray, width: int) -> np.ndarray:
    n = len(token_hashes) - width + 1
    with np.errstate(over="ignore"):
        if n <= 0:
            # degenerate short text: one shingle over everything
            h = _FNV_OFFSET
            for t in token_hashes:
                h = (h ^ np.uint64(t)) * _FNV_PRIME
            return np.array([h], dtype=np.uint64)
        out = np.full(n, _FNV_OFFSET, dtype=np.uint64)
        for k in range(width):
            out = (out ^ token_hashes[k : k + n]) * _FNV_PRIME
    return out


def minhash_np(shingles: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-permutation minimum of the multiply-add bijection a*h + b (mod 2^64)."""
    with np.errstate(over="ignore"):
        vals = shingles[:, None] * a[None, :] + b[None, :]
    return vals.min(axis=0)


def adc_scan_np(codes: np.ndarray, lut: np.ndarray) -> np.ndarray:
    """Asymmetric-distance scores: sum of per-subspace table lookups.

    codes: (n, m) uint8 of centroid ids; lut: (m, k) float32.
    """
    m = codes.shape[1]
    return lut[np.arange(m)[None, :], codes].sum(axis=1, dtype=np.float32)


def bm25_block_np(tfs, lens, idf, k1, b, avg_len):
    tfs = tfs.astype(np.float64, copy=False)
    norm = k1 * (1.0 - b + b * (lens.astype(np.float64) / avg_len))
    return idf * (tfs * (k1 + 1.0)) / (tfs + norm)


def scatter_add_signed_np(out, rows, cols, signs):
    np.add.at(out, (rows, cols), signs)
    return out


def table_find_np(keys, vals, queries):
    cap = len(keys)
    mask = np.uint64(cap - 1)
    out = np.empty(len(queries), dtype=np.uint32)
    for i, q in enumerate(np.asarray(queries, dtype=np.uint64)):
        slot = int(q & mask)
        res = _EMPTY_SLOT
        while keys[slot] != 0:
            if keys[slot] == q:
                res = vals[slot]
                break
            slot = (slot + 1) & int(mask)
        out[i] = res
    return out


def table_insert_np(keys, vals, new_keys, new_vals):
    cap = len(keys)
    mask = np.uint64(cap - 1)
    inserted = 0
    for q, v in zip(np.asarray(new_keys, dtype=np.uint64), new_vals):
        slot = int(q & mask)
        while keys[slot] != 0:
            if keys[slot] == q:
                break
            slot = (slot + 1) & int(mask)
        else:
            pass
        if keys[slot] == 0:
            keys[slot] = q
            vals[slot] = v
            inserted += 1
    return inserted


def band_probe_np(tkeys, tvals, queries, window):
    cap = len(tkeys)
    out = np.empty(len(queries), dtype=np.uint32)
    for i, q in enumerate(np.asarray(queries, dtype=np.uint64)):
        base = int(q % np.uint64(cap))
        res = _EMPTY_SLOT
        for w in range(window):
            slot = (base + w) % cap
            if tkeys[slot] == q:
                res = tvals[slot]
                break
        out[i] = res
    return out


def band_insert_np(tkeys, tvals, queries, ordinals, window):
    cap = len(tkeys)
    for q, o in zip(np.asarray(queries, dtype=np.uint64), ordinals):
        base = int(q % np.uint64(cap))
        victim = base
        placed = False
        for w in range(window):
            slot = (base + w) % cap
            if tkeys[slot] == q or tkeys[slot] == 0:
                tkeys[slot] = q
                tvals[slot] = o
                placed = True
                break
        if not placed:
            # bounded table: evict deterministically inside the probe window
            victim = (base + int(q >> np.uint64(59)) % window) % cap
            tkeys[victim] = q
            tvals[victim] = o


def bands_probe_np(tkeys2d, tvals2d, keys, window):
    """Probe one key per band across all band tables at once."""
    out = np.empty(len(keys), dtype=np.uint32)
    for band in range(len(keys)):
        out[band] = band_probe_np(tkeys2d[band], tvals2d[band], keys[band : band + 1], window)[0]
    return out


def bands_insert_np(tkeys2d, tvals2d, keys, ordinal, window):
    for band in range(len(keys)):
        band_insert_np(
            tkeys2d[band], tvals2d[band], keys[band : band + 1],
            np.array([ordinal], dtype=np.uint32), window,
        )


# ---------------------------------------------------------------------------
# numba twins
# ---------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def _token_hashes_nb(cp, starts, ends, salt):
        n = len(starts)
        out = np.empty(n, dtype=np.uint64)
        base = np.uint64(14695981039346656037) ^ salt
        prime = np.uint64(1099511628211)
        for i in range(n):
            h = base
            for j in range(starts[i], ends[i]):
                h = (h ^ np.uint64(cp[j])) * prime
            out[i] = h
        return out

    @njit(cache=True)
    def _shingle_hashes_nb(token_hashes, width):
        n = len(token_hashes) - width + 1
        offset = np.uint64(14695981039346656037)
        prime = np.uint64(1099511628211)
        if n <= 0:
            out = np.empty(1, dtype=np.uint64)
            h = offset
            for t in token_hashes:
                h = (h ^ t) * prime
            out[0] = h
            return out
        out = np.empty(n, dtype=np.uint64)
        for i in range(n):
            h = offset
            for k in range(width):
                h = (h ^ token_hashes[i + k]) * prime
            out[i] = h
        return out

    @njit(cache=True)
    def _minhash_nb(shingles, a, b):
        p = len(a)
        out = np.empty(p, dtype=np.uint64)
        for i in range(p):
            best = np.uint64(0xFFFFFFFFFFFFFFFF)
            ai = a[i]
            bi = b[i]
            for s in shingles:
                v = s * ai + bi
                if v < best:
                    best = v
            out[i] = best
        return out

    @njit(cache=True)
    def _adc_scan_nb(codes, lut):
        n, m = codes.shape
        out = np.empty(n, dtype=np.float32)
        for i in range(n):
            acc = np.float32(0.0)
            for j in range(m):
                acc += lut[j, codes[i, j]]
            out[i] = acc
        return out

    @njit(cache=True)
    def _bm25_block_nb(tfs, lens, idf, k1, b, avg_len):
        n = len(tfs)
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            tf = np.float64(tfs[i])
            norm = k1 * (1.0 - b + b * (np.float64(lens[i]) / avg_len))
            out[i] = idf * (tf * (k1 + 1.0)) / (tf + norm)
        return out

    @njit(cache=True)
    def _scatter_add_signed_nb(out, rows, cols, signs):
        for i in range(len(rows)):
            out[rows[i], cols[i]] += signs[i]
        return out

    @njit(cache=True)
    def _table_find_nb(keys, vals, queries):
        mask = np.uint64(len(keys) - 1)
        one = np.uint64(1)
        zero = np.uint64(0)
        out = np.empty(len(queries), dtype=np.uint32)
        for i in range(len(queries)):
            q = queries[i]
            slot = q & mask
            res = np.uint32(0xFFFFFFFF)
            while keys[slot] != zero:
                if keys[slot] == q:
                    res = vals[slot]
                    break
                slot = (slot + one) & mask
            out[i] = res
        return out

    @njit(cache=True)
    def _table_insert_nb(keys, vals, new_keys, new_vals):
        mask = np.uint64(len(keys) - 1)
        one = np.uint64(1)
        zero = np.uint64(0)
        inserted = 0
        for i in range(len(new_keys)):
            q = new_keys[i]
            slot = q & mask
            while keys[slot] != zero and keys[slot] != q:
                slot = (slot + one) & mask
            if keys[slot] == zero:
                keys[slot] = q
                vals[slot] = new_vals[i]
                inserted += 1
        return inserted

    @njit(cache=True)
    def _band_probe_nb(tkeys, tvals, queries, window):
        cap = np.uint64(len(tkeys))
        out = np.empty(len(queries), dtype=np.uint32)
        for i in range(len(queries)):
            q = queries[i]
            base = q % cap
            res = np.uint32(0xFFFFFFFF)
            for w in range(window):
                slot = (base + np.uint64(w)) % cap
                if tkeys[slot] == q:
                    res = tvals[slot]
                    break
            out[i] = res
        return out

    @njit(cache=True)
    def _band_insert_nb(tkeys, tvals, queries, ordinals, window):
        cap = np.uint64(len(tkeys))
        zero = np.uint64(0)
        wnd = np.uint64(window)
        for i in range(len(queries)):
            q = queries[i]
            base = q % cap
            placed = False
            for w in range(window):
                slot = (base + np.uint64(w)) % cap
                if tkeys[slot] == q or tkeys[slot] == zero:
                    tkeys[slot] = q
                    tvals[slot] = ordinals[i]
                    placed = True
                    break
            if not placed:
                victim = (base + (q >> np.uint64(59)) % wnd) % cap
                tkeys[victim] = q
                tvals[victim] = ordinals[i]

    @njit(cache=True)
    def _bands_probe_nb(tkeys2d, tvals2d, keys, window):
        n_bands = keys.shape[0]
        cap = np.uint64(tkeys2d.shape[1])
        out = np.empty(n_bands, dtype=np.uint32)
        for band in range(n_bands):
            q = keys[band]
            base = q % cap
            res = np.uint32(0xFFFFFFFF)
            for w in range(window):
                slot = (base + np.uint64(w)) % cap
                if tkeys2d[band, slot] == q:
                    res = tvals2d[band, slot]
                    break
            out[band] = res
        return out

    @njit(cache=True)
    def _bands_insert_nb(tkeys2d, tvals2d, keys, ordinal, window):
        n_bands = keys.shape[0]
        cap = np.uint64(tkeys2d.shape[1])
        zero = np.uint64(0)
        wnd = np.uint64(window)
        for band in range(n_bands):
            q = keys[band]
            base = q % cap
            placed = False
            for w in range(window):
                slot = (base + np.uint64(w)) % cap
                if tkeys2d[band, slot] == q or tkeys2d[band, slot] == zero:
                    tkeys2d[band, slot] = q
                    tvals2d[band, slot] = ordinal
                    placed = True
                    break
            if not placed:
                victim = (base + (q >> np.uint64(59)) % wnd) % cap
                tkeys2d[band, victim] = q
                tvals2d[band, victim] = ordinal


_NUMPY_IMPLS = {
    "token_hashes": token_hashes_np,
    "shingle_hashes": shingle_hashes_np,
    "minhash": minhash_np,
    "adc_scan": adc_scan_np,
    "bm25_block": bm25_block_np,
    "scatter_add_signed": scatter_add_signed_np,
    "table_find": table_find_np,
    "table_insert": table_insert_np,
    "band_probe": band_probe_np,
    "band_insert": band_insert_np,
    "bands_probe": bands_probe_np,
    "bands_insert": bands_insert_np,
}

if HAS_NUMBA:
    _NUMBA_IMPLS = {
        "token_hashes": _token_hashes_nb,
        "shingle_hashes": _shingle_hashes_nb,
        "minhash": _minhash_nb,
        "adc_scan": _adc_scan_nb,
        "bm25_block": _bm25_block_nb,
        "scatter_add_signed": _scatter_add_signed_nb,
        "table_find": _table_find_nb,
        "table_insert": _table_insert_nb,
        "band_probe": _band_probe_nb,
        "band_insert": _band_insert_nb,
        "bands_probe": _bands_probe_nb,
        "bands_insert": _bands_insert_nb,
    }
else:
    _NUMBA_IMPLS = None

IMPLS = {"numpy": _NUMPY_IMPLS, "numba": _NUMBA_IMPLS}
_active = _NUMBA_IMPLS if HAS_NUMBA else _NUMPY_IMPLS

token_hashes = _active["token_hashes"]
shingle_hashes = _active["shingle_hashes"]
minhash = _active["minhash"]
adc_scan = _active["adc_scan"]
bm25_block = _active["bm25_block"]
scatter_add_signed = _active["scatter_add_signed"]
table_find = _active["table_find"]
table_insert = _active["table_insert"]
band_probe = _active["band_probe"]
band_insert = _active["band_insert"]
bands_probe = _active["bands_probe"]
bands_insert = _active["bands_insert"]

EMPTY = int(_EMPTY_SLOT)


class U64Table:
    """Growable open-addressing map from nonzero uint64 keys to uint32 values.

    Key 0 is reserved as the empty-slot marker; callers must remap it
    (hash outputs of 0 are rewritten to 1 upstream).
    """

    def __init__(self, capacity: int = 1 << 12):
        cap = 1 << max(4, (capacity - 1).bit_length())
        self.keys = np.zeros(cap, dtype=np.uint64)
        self.vals = np.zeros(cap, dtype=np.uint32)
        self.size = 0

    def __len__(self) -> int:
        return self.size

    @property
    def nbytes(self) -> int:
        return self.keys.nbytes + self.vals.nbytes

    def find(self, queries: np.ndarray) -> np.ndarray:
        """Return uint32 values, EMPTY where a key is absent."""
        return table_find(self.keys, self.vals, np.ascontiguousarray(queries, dtype=np.uint64))

    def insert(self, new_keys: np.ndarray, new_vals: np.ndarray) -> int:
        """Insert keys not already present; first writer wins. Returns count added."""
        new_keys = np.ascontiguousarray(new_keys, dtype=np.uint64)
        new_vals = np.ascontiguousarray(new_vals, dtype=np.uint32)
        if self.size + len(new_keys) > 0.6 * len(self.keys):
            self._grow(self.size + len(new_keys))
        self.size += int(table_insert(self.keys, self.vals, new_keys, new_vals))
        return self.size

    def _grow(self, needed: int) -> None:
        new_cap = len(self.keys)
        while needed > 0.6 * new_cap:
            new_cap *= 2
        old_keys, old_vals = self.keys, self.vals
        self.keys = np.zeros(new_cap, dtype=np.uint64)
        self.vals = np.zeros(new_cap, dtype=np.uint32)
        live = old_keys != 0
        self.size = 0
        self.size = int(table_insert(self.keys, self.vals, old_keys[live], old_vals[live]))
