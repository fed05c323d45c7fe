"""Command-line interface.

Verbs: ingest, index-sparse, index-dense, calibrate, query, serve,
bench-latency, bench-memory, bench-quant, bench-kernels, eval.

Environment: TIERKITE_CONFIG points at a JSON config file,
TIERKITE_PROFILE forces the laptop|full profile.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from tierkite.engine import bench as bench_mod
from tierkite.engine.config import load_config
from tierkite.engine.engine import Engine
from tierkite.engine.evalmetrics import eval_retrieval, load_qrels


def _engine(args, **overrides) -> Engine:
    cfg = load_config(engine_dir=Path(args.engine_dir), **overrides)
    return Engine(cfg)


def _emit(args, data, title: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(data, indent=2, default=str))
    else:
        print(bench_mod.render_table(data, title))
    if getattr(args, "out", None):
        bench_mod.dump_json(data, Path(args.out))


def cmd_ingest(args) -> int:
    engine = _engine(args)
    extra = {}
    if args.batch_size:
        engine.config.batch_size = args.batch_size
    result = engine.ingest(Path(args.corpus_dir), profile_memory=args.profile_memory, **extra)
    summary = {
        "docs": result.docs,
        "chunks": result.chunks_kept,
        "near_duplicates_dropped": result.chunks_dropped,
        "shards": len(result.manifests),
        "max_buffer": result.max_buffer,
        "elapsed_s": round(result.elapsed_s, 2),
        "store": str(engine.config.store_path),
    }
    if args.profile_memory:
        from tierkite.ingest.memory import memory_report

        report = memory_report(result.samples)
        if args.report == "csv":
            print("t_ms,rss_bytes,phase")
            for s in report["samples"]:
                print(f"{s['t_ms']},{s['rss_bytes']},{s['phase']}")
        else:
            print(json.dumps({**report, "samples": report["samples"][-20:]}, indent=2))
        summary["memory_delta_mb"] = round(report["delta"] / 2**20, 1)
        summary["memory_verdict"] = report["verdict"]
    print(json.dumps(summary, indent=2))
    return 0


def cmd_index_sparse(args) -> int:
    from tierkite.ingest.store import ChunkStore
    from tierkite.sparse.build import build_sparse

    store = ChunkStore(Path(args.store))
    out = Path(args.out)
    index = build_sparse(store, out)
    print(json.dumps({"terms": index.term_count, "chunks": index.doc_count, "file": str(out)}))
    return 0


def cmd_index_dense(args) -> int:
    engine = _engine(args, pq_m=args.m, pq_nbits=args.nbits, nlist=args.nlist)
    engine.build_indexes(nlist=args.nlist)
    print(json.dumps({"cold": str(engine.config.cold_path), "sparse": str(engine.config.sparse_path)}))
    return 0


def cmd_calibrate(args) -> int:
    engine = _engine(args)
    engine.load()
    queries = [q for q in Path(args.queries).read_text().splitlines() if q.strip()]
    record = engine.calibrate(queries, k=args.k)
    print(json.dumps({
        "corpus_id": record.corpus_id,
        "mean_degradation": record.mean_degradation,
        "queries": len(record.per_query),
        "beta": record.beta,
        "file": str(engine.config.calibration_path),
    }, indent=2))
    return 0


def cmd_query(args) -> int:
    engine = _engine(args)
    engine.load()
    hits, stats = engine.hybrid_query(
        args.q, k=args.k, alpha_mode=args.alpha_mode, use_cache=not args.no_cache
    )
    for rank, hit in enumerate(hits, start=1):
        print(json.dumps({
            "type": "hit",
            "rank": rank,
            "doc_ref": engine.chunk_ref(hit.doc_ref),
            "score": hit.qar_adjusted_score,
            "channel": "+".join(sorted(hit.contributions)),
        }))
    print(json.dumps({"type": "done", "latency_ms": stats.total_ms, "cache_hit": stats.cache_hit}))
    return 0


def cmd_serve(args) -> int:
    from tierkite.engine.service import serve

    engine = _engine(args)
    engine.load()
    server = serve(engine, host=args.host, port=args.port)
    print(f"tierkite serving on http://{args.host}:{server.server_address[1]}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def cmd_bench_latency(args) -> int:
    engine = _engine(args)
    engine.load()
    queries = [q for q in Path(args.queries).read_text().splitlines() if q.strip()]
    report = bench_mod.bench_latency(
        engine, queries, runs=args.runs, cold=args.cold, batch=args.batch
    )
    _emit(args, {**report.stages, "total": report.total}, f"latency ({report.mode}, {report.runs} runs) [ms]")
    return 0


def cmd_bench_memory(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    results = bench_mod.bench_memory(Path(args.work_dir), sizes_mb=sizes, keep_corpora=args.keep_corpora)
    _emit(args, results, "ingestion memory scaling")
    return 0


def cmd_bench_quant(args) -> int:
    grid = bench_mod.bench_quant(
        m_values=tuple(int(x) for x in args.m.split(",")),
        nbits_values=tuple(int(x) for x in args.nbits.split(",")),
        nprobe_values=tuple(int(x) for x in args.nprobe.split(",")),
    )
    _emit(args, grid, "quantization sensitivity (recall@10 vs exact search)")
    return 0


def cmd_bench_kernels(args) -> int:
    results = bench_mod.bench_kernels(n=args.n)
    _emit(args, results, "kernel timings [ms] (numpy vs numba)")
    return 0


def cmd_eval(args) -> int:
    qrels = load_qrels(Path(args.qrels))
    run: dict[str, list[str]] = {}
    if args.run:
        for line in Path(args.run).read_text().splitlines():
            if not line.strip():
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            run.setdefault(parts[0], []).append(parts[1])
    else:
        engine = _engine(args)
        engine.load()
        queries = json.loads(Path(args.queries).read_text())
        for qid, qtext in queries.items():
            hits, _ = engine.hybrid_query(qtext, k=100, use_cache=False)
            run[qid] = [engine.chunk_ref(h.doc_ref) for h in hits]
    metrics = eval_retrieval(qrels, run)
    print(json.dumps(metrics, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tierkite", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--engine-dir", default="engine", help="engine directory")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--out", help="also write JSON results to this path")

    sp = sub.add_parser("ingest", help="stream a corpus into a chunk store")
    sp.add_argument("corpus_dir")
    sp.add_argument("--batch-size", type=int, default=None)
    sp.add_argument("--profile-memory", action="store_true")
    sp.add_argument("--report", choices=("json", "csv"), default="json")
    common(sp)
    sp.set_defaults(fn=cmd_ingest)

    sp = sub.add_parser("index-sparse", help="build the BM25 index from a store")
    sp.add_argument("store")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_index_sparse)

    sp = sub.add_parser("index-dense", help="build dense indexes (and sparse) for an engine dir")
    sp.add_argument("--m", type=int, default=8)
    sp.add_argument("--nbits", type=int, default=8)
    sp.add_argument("--nlist", type=int, default=1000)
    common(sp)
    sp.set_defaults(fn=cmd_index_dense)

    sp = sub.add_parser("calibrate", help="measure quantization degradation on dev queries")
    sp.add_argument("--queries", required=True, help="text file, one query per line")
    sp.add_argument("-k", type=int, default=10)
    common(sp)
    sp.set_defaults(fn=cmd_calibrate)

    sp = sub.add_parser("query", help="run one hybrid query")
    sp.add_argument("--q", required=True)
    sp.add_argument("-k", type=int, default=10)
    sp.add_argument("--alpha-mode", choices=("fixed", "adaptive"), default=None)
    sp.add_argument("--no-cache", action="store_true")
    common(sp)
    sp.set_defaults(fn=cmd_query)

    sp = sub.add_parser("serve", help="start the local NDJSON query service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8080)
    common(sp)
    sp.set_defaults(fn=cmd_serve)

    sp = sub.add_parser("bench-latency", help="latency percentiles, cold or warm")
    sp.add_argument("--queries", required=True)
    sp.add_argument("--runs", type=int, default=1000)
    sp.add_argument("--batch", type=int, default=10)
    sp.add_argument("--cold", action="store_true")
    common(sp)
    sp.set_defaults(fn=cmd_bench_latency)

    sp = sub.add_parser("bench-memory", help="O(1) ingestion-buffer validation")
    sp.add_argument("--work-dir", default="bench-memory")
    sp.add_argument("--sizes", default="50,200,1024", help="corpus sizes in MB")
    sp.add_argument("--keep-corpora", action="store_true")
    common(sp)
    sp.set_defaults(fn=cmd_bench_memory)

    sp = sub.add_parser("bench-quant", help="quantization sensitivity grid")
    sp.add_argument("--m", default="4,8,16")
    sp.add_argument("--nbits", default="4,8")
    sp.add_argument("--nprobe", default="1,10,50")
    common(sp)
    sp.set_defaults(fn=cmd_bench_quant)

    sp = sub.add_parser("bench-kernels", help="compare numba kernels against numpy fallbacks")
    sp.add_argument("--n", type=int, default=200_000)
    common(sp)
    sp.set_defaults(fn=cmd_bench_kernels)

    sp = sub.add_parser("eval", help="trec-style metrics from qrels and a run")
    sp.add_argument("--qrels", required=True)
    sp.add_argument("--run", help="TSV run file (query_id, doc_ref) in rank order")
    sp.add_argument("--queries", help="JSON {query_id: text} to execute instead of --run")
    common(sp)
    sp.set_defaults(fn=cmd_eval)

    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
