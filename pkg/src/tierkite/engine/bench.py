"""Benchmark harnesses: memory scaling, latency percentiles, quantization
sensitivity, and the numba-vs-numpy kernel comparison.

All outputs are JSON-serializable dicts; ``render_table`` turns any of
them into an aligned human table.
"""

from __future__ import annotations

import gc
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tierkite import kernels
from tierkite.dense.flat import FlatIndex
from tierkite.dense.ivfpq import ColdIndex
from tierkite.dense.pq import train_quantizer
from tierkite.engine.engine import Engine
from tierkite.engine.evalmetrics import percentile
from tierkite.errors import BenchError
from tierkite.ingest.config import IngestConfig
from tierkite.ingest.ingestor import streaming_ingest
from tierkite.ingest.memory import memory_report

# -- synthetic corpora --------------------------------------------------------

_EN_FILLER = (
    "the of and to in that it was for on are with they this have from one had "
    "word but not what all were when your can said there use each which how"
).split()


def generate_corpus(
    out_dir: Path,
    total_bytes: int,
    seed: int = 42,
    vocab_size: int = 20_000,
    doc_tokens: int = 24_000,
    block_tokens: int = 2_048,
    n_blocks: int = 1_024,
) -> dict:
    """Write plain-text files with size-independent document statistics.

    Documents are concatenations of pre-rendered random token blocks, so a
    50 MB and a 1 GB corpus share vocabulary, token-length distribution,
    and document length; only the file count differs.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(seed))
    vocab = [f"w{i:05d}" for i in range(vocab_size)]
    blocks: list[str] = []
    for _ in range(n_blocks):
        ids = rng.integers(0, vocab_size, block_tokens)
        words = [vocab[i] for i in ids]
        # sprinkle stopwords so language detection resolves to English
        for j in range(0, block_tokens, 16):
            words[j] = _EN_FILLER[int(ids[j]) % len(_EN_FILLER)]
        blocks.append(" ".join(words))

    written = 0
    doc_blocks = max(1, doc_tokens // block_tokens)
    doc_idx = 0
    while written < total_bytes:
        picks = rng.integers(0, n_blocks, doc_blocks)
        text = " ".join(blocks[p] for p in picks)
        sub = out_dir / f"part{doc_idx // 512:03d}"
        sub.mkdir(exist_ok=True)
        path = sub / f"doc{doc_idx:06d}.txt"
        path.write_text(text)
        written += len(text)
        doc_idx += 1
    return {"files": doc_idx, "bytes": written, "dir": str(out_dir)}


# -- memory scaling -------------------------------------------------------------


def warm_kernels() -> None:
    """Force jit compilation outside any measured window."""
    cp = np.arange(64, dtype=np.uint32) + 97
    starts = np.arange(0, 64, 8, dtype=np.int64)
    ends = starts + 7
    th = kernels.token_hashes(cp, starts, ends, np.uint64(1))
    sh = kernels.shingle_hashes(th, 3)
    a = np.full(16, 3, dtype=np.uint64)
    b = np.zeros(16, dtype=np.uint64)
    kernels.minhash(sh, a, b)
    kernels.adc_scan(np.zeros((4, 8), dtype=np.uint8), np.zeros((8, 256), dtype=np.float32))
    kernels.bm25_block(np.ones(4, np.uint32), np.ones(4, np.uint32), 1.0, 1.2, 0.75, 1.0)
    tk = np.zeros((2, 64), dtype=np.uint64)
    tv = np.zeros((2, 64), dtype=np.uint32)
    keys = np.array([5, 9], dtype=np.uint64)
    kernels.bands_insert(tk, tv, keys, np.uint32(1), 8)
    kernels.bands_probe(tk, tv, keys, 8)
    t = kernels.U64Table(64)
    t.insert(np.array([7], np.uint64), np.array([1], np.uint32))
    t.find(np.array([7], np.uint64))
    out = np.zeros((2, 8), dtype=np.float32)
    kernels.scatter_add_signed(out, np.zeros(2, np.int64), np.zeros(2, np.int64), np.ones(2, np.float32))


def bench_memory(
    work_dir: Path,
    sizes_mb: tuple[int, ...] = (50, 200, 1024),
    seed: int = 42,
    batch_size: int = 50,
    bound_bytes: int = 500 * 1024 * 1024,
    keep_corpora: bool = False,
) -> dict:
    """Ingest same-statistics corpora at several sizes and report RSS deltas."""
    import shutil

    work_dir = Path(work_dir)
    warm_kernels()
    results = {}
    deltas = []
    for size_mb in sizes_mb:
        corpus = work_dir / f"corpus-{size_mb}mb"
        if not corpus.exists():
            generate_corpus(corpus, size_mb * 1024 * 1024, seed=seed)
        shard_dir = work_dir / f"shards-{size_mb}mb"
        out = work_dir / f"store-{size_mb}mb.tkcs"
        gc.collect()
        res = streaming_ingest(
            corpus, out,
            IngestConfig(shard_dir=shard_dir, batch_size=batch_size, profile_memory=True),
        )
        report = memory_report(res.samples, bound_bytes=bound_bytes)
        report_summary = {k: report[k] for k in ("min", "max", "delta", "verdict")}
        report_summary["chunks"] = res.chunks_kept
        report_summary["max_buffer"] = res.max_buffer
        report_summary["elapsed_s"] = round(res.elapsed_s, 2)
        results[f"{size_mb}MB"] = report_summary
        deltas.append(report["delta"])
        res.store.close()
        shutil.rmtree(shard_dir, ignore_errors=True)
        if not keep_corpora:
            shutil.rmtree(corpus, ignore_errors=True)
        gc.collect()
    results["delta_ratio"] = round(max(deltas) / max(min(deltas), 1), 3)
    results["all_bounded"] = all(d < bound_bytes for d in deltas)
    return results


# -- latency ---------------------------------------------------------------------

STAGES = ("embed", "dense_search", "sparse_search", "fusion")


@dataclass
class LatencyReport:
    mode: str
    runs: int
    stages: dict = field(default_factory=dict)  # stage -> {p50, p95, p99}
    total: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "runs": self.runs, "stages": self.stages, "total": self.total}


def bench_latency(
    engine: Engine,
    queries: list[str],
    runs: int = 1000,
    batch: int = 10,
    cold: bool = False,
    seed: int = 42,
    use_cache: bool = False,
) -> LatencyReport:
    """Cold mode re-maps the cold index first; warm mode runs randomized
    batches. Stage percentiles are nearest-rank."""
    if len(queries) < 20:
        raise BenchError(f"need at least 20 queries, got {len(queries)}")
    rng = np.random.Generator(np.random.PCG64(seed))
    samples: dict[str, list[float]] = {s: [] for s in STAGES}
    totals: list[float] = []

    if cold:
        engine.cache.clear()
        engine.reopen_cold()
        schedule = [queries[int(i)] for i in rng.integers(0, len(queries), min(runs, 50))]
    else:
        order = rng.permutation(runs)
        schedule = [queries[int(i) % len(queries)] for i in order]

    for start in range(0, len(schedule), batch):
        for q in schedule[start : start + batch]:
            _, st = engine.hybrid_query(q, k=10, use_cache=use_cache)
            samples["embed"].append(st.embed_ms)
            samples["dense_search"].append(st.dense_ms)
            samples["sparse_search"].append(st.sparse_ms)
            samples["fusion"].append(st.fusion_ms)
            totals.append(st.total_ms)

    def pct(values: list[float]) -> dict:
        return {p: round(percentile(values, q), 3) for p, q in (("p50", 50), ("p95", 95), ("p99", 99))}

    return LatencyReport(
        mode="cold" if cold else "warm",
        runs=len(totals),
        stages={s: pct(v) for s, v in samples.items()},
        total=pct(totals),
    )


# -- quantization sensitivity ----------------------------------------------------


def make_clustered_vectors(
    n_groups: int = 2000, group_size: int = 10, d: int = 96, sigma: float = 0.08,
    n_queries: int = 100, query_sigma: float = 0.08, seed: int = 42,
) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors in tight groups around random centers, plus perturbed
    group-center queries; the exact top-10 of a query is dominated by one
    group, so quantized recall is meaningfully separable."""
    rng = np.random.Generator(np.random.PCG64(seed))
    centers = rng.normal(size=(n_groups, d)).astype(np.float32)
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    pts = np.repeat(centers, group_size, axis=0)
    pts = pts + sigma * rng.normal(size=pts.shape).astype(np.float32)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    queries = centers[:n_queries] + query_sigma * rng.normal(size=(n_queries, d)).astype(np.float32)
    queries /= np.linalg.norm(queries, axis=1, keepdims=True)
    return pts, queries


def bench_quant(
    m_values: tuple[int, ...] = (4, 8, 16),
    nbits_values: tuple[int, ...] = (4, 8),
    nprobe_values: tuple[int, ...] = (1, 10, 50),
    n_groups: int = 2000,
    group_size: int = 10,
    d: int = 96,
    nlist: int = 64,
    seed: int = 42,
    at_k: int = 10,
) -> dict:
    """Recall@k against the exact-search oracle over the parameter grid."""
    pts, queries = make_clustered_vectors(n_groups=n_groups, group_size=group_size, d=d, seed=seed)
    flat = FlatIndex(d)
    flat.add(np.arange(len(pts)), pts)
    exact = [set(i for i, _ in flat.search(q, at_k)) for q in queries]
    grid = {}
    for m in m_values:
        if d % m != 0:
            continue
        for nbits in nbits_values:
            if (m * nbits) % 8 != 0:
                continue
            cb, coarse = train_quantizer(pts[: min(len(pts), 10000)], m=m, nbits=nbits, nlist=nlist, seed=seed)
            cold = ColdIndex(cb, coarse)
            cold.add(np.arange(len(pts)), pts)
            for nprobe in nprobe_values:
                hits = 0.0
                for q, truth in zip(queries, exact):
                    approx = set(i for i, _ in cold.search(q, at_k, nprobe=nprobe))
                    hits += len(truth & approx) / at_k
                grid[f"m={m},nbits={nbits},nprobe={nprobe}"] = {
                    "recall@10": round(hits / len(queries), 4),
                    "bytes_per_vector": m * nbits // 8,
                }
    return grid


# -- kernel comparison -------------------------------------------------------------


def bench_kernels(n: int = 200_000, repeats: int = 5, seed: int = 0) -> dict:
    """Time each hot kernel under both implementations."""
    rng = np.random.Generator(np.random.PCG64(seed))
    cp = rng.integers(97, 123, n, dtype=np.uint32)
    starts = np.arange(0, n - 8, 8, dtype=np.int64)
    ends = starts + 7
    tok = rng.integers(1, 2**63, n // 8, dtype=np.uint64)
    a = (rng.integers(1, 2**63, 128, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
    b = rng.integers(0, 2**63, 128, dtype=np.uint64)
    shingles = rng.integers(1, 2**63, 4096, dtype=np.uint64)
    codes = rng.integers(0, 256, (n // 4, 8)).astype(np.uint8)
    lut = rng.random((8, 256)).astype(np.float32)
    tfs = rng.integers(1, 20, n // 4).astype(np.uint32)
    lens = rng.integers(64, 512, n // 4).astype(np.uint32)

    cases = {
        "token_hashes": (lambda f: f(cp, starts, ends, np.uint64(7))),
        "shingle_hashes": (lambda f: f(tok, 5)),
        "minhash": (lambda f: f(shingles, a, b)),
        "adc_scan": (lambda f: f(codes, lut)),
        "bm25_block": (lambda f: f(tfs, lens, 1.5, 1.2, 0.75, 256.0)),
    }
    out = {}
    for name, runner in cases.items():
        row = {}
        for impl_name in ("numpy", "numba"):
            impls = kernels.IMPLS[impl_name]
            if impls is None:
                row[impl_name] = None
                continue
            fn = impls[name]
            runner(fn)  # warm / jit
            best = min(_time_once(runner, fn) for _ in range(repeats))
            row[impl_name] = round(best * 1000, 3)
        if row.get("numba") and row.get("numpy"):
            row["speedup"] = round(row["numpy"] / row["numba"], 2)
        out[name] = row
    return out


def _time_once(runner, fn) -> float:
    t0 = time.perf_counter()
    runner(fn)
    return time.perf_counter() - t0


# -- rendering ----------------------------------------------------------------------


def render_table(data: dict, title: str = "") -> str:
    """Flatten a {row: {col: val}} dict into an aligned text table."""
    rows = [(k, v) for k, v in data.items() if isinstance(v, dict)]
    scalars = {k: v for k, v in data.items() if not isinstance(v, dict)}
    lines = []
    if title:
        lines.append(title)
    if rows:
        cols = sorted({c for _, v in rows for c in v})
        widths = [max(len(str(r)) for r, _ in rows)] + [
            max(len(c), max((len(str(v.get(c, ""))) for _, v in rows), default=0)) for c in cols
        ]
        header = "  ".join(["".ljust(widths[0])] + [c.rjust(w) for c, w in zip(cols, widths[1:])])
        lines.append(header)
        lines.append("-" * len(header))
        for name, v in rows:
            lines.append(
                "  ".join([str(name).ljust(widths[0])] + [str(v.get(c, "")).rjust(w) for c, w in zip(cols, widths[1:])])
            )
    for k, v in scalars.items():
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def dump_json(data, path: Path | None) -> None:
    if path is not None:
        Path(path).write_text(json.dumps(data, indent=2, default=str))
