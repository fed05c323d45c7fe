"""Local HTTP service: health, NDJSON query streaming, ingest jobs, stats.

Endpoints:
    GET  /health  -> {"status": "ok"}; never takes the write lock
    POST /query   -> NDJSON stream: one {"type":"hit",...} per result, then
                     exactly one {"type":"done","latency_ms":...,"cache_hit":...}
    POST /ingest  -> 202 {"job_id": n} and runs in the background; 409 when
                     another writer holds the lock
    GET  /stats   -> ledger snapshot plus index sizes

Malformed requests get a 400 with a JSON error body.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from tierkite.engine.engine import Engine
from tierkite.errors import TierkiteError, WouldBlock

logger = logging.getLogger(__name__)


class TierkiteService(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, engine: Engine, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _Handler)
        self.engine = engine
        self._job_seq = 0
        self._job_lock = threading.Lock()

    def next_job_id(self) -> int:
        with self._job_lock:
            self._job_seq += 1
            return self._job_seq


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: TierkiteService

    def log_message(self, fmt, *args):  # quiet by default
        logger.debug("%s " + fmt, self.address_string(), *args)

    # -- helpers -------------------------------------------------------------

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b"{}"
        payload = json.loads(raw.decode("utf-8"))
        if not isinstance(payload, dict):
            raise ValueError("request body must be a JSON object")
        return payload

    # -- routes ---------------------------------------------------------------

    def do_GET(self):
        if self.path == "/health":
            self._send_json(200, {"status": "ok"})
        elif self.path == "/stats":
            self._send_json(200, self.server.engine.stats())
        else:
            self._send_json(404, {"error": f"no route {self.path}"})

    def do_POST(self):
        try:
            if self.path == "/query":
                self._handle_query()
            elif self.path == "/ingest":
                self._handle_ingest()
            else:
                self._send_json(404, {"error": f"no route {self.path}"})
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            self._send_json(400, {"error": str(exc)})
        except WouldBlock as exc:
            self._send_json(409, {"error": str(exc)})
        except TierkiteError as exc:
            self._send_json(400, {"error": str(exc)})

    def _handle_query(self) -> None:
        payload = self._read_body()
        query = payload.get("q")
        if not isinstance(query, str) or not query.strip():
            raise ValueError("field 'q' (non-empty string) is required")
        k = int(payload.get("k", 10))
        alpha_mode = payload.get("alpha_mode")
        use_cache = not bool(payload.get("no_cache", False))

        engine = self.server.engine
        hits, stats = engine.hybrid_query(query, k=k, alpha_mode=alpha_mode, use_cache=use_cache)

        self.send_response(200)
        self.send_header("Content-Type", "application/x-ndjson")
        self.send_header("Connection", "close")
        self.end_headers()
        for rank, hit in enumerate(hits, start=1):
            event = {
                "type": "hit",
                "rank": rank,
                "doc_ref": engine.chunk_ref(hit.doc_ref),
                "score": hit.qar_adjusted_score,
                "channel": "+".join(sorted(hit.contributions)),
            }
            self.wfile.write((json.dumps(event) + "\n").encode("utf-8"))
            self.wfile.flush()
        done = {"type": "done", "latency_ms": stats.total_ms, "cache_hit": stats.cache_hit}
        self.wfile.write((json.dumps(done) + "\n").encode("utf-8"))
        self.wfile.flush()
        self.close_connection = True

    def _handle_ingest(self) -> None:
        payload = self._read_body()
        corpus_dir = payload.get("corpus_dir")
        if not corpus_dir:
            raise ValueError("field 'corpus_dir' is required")
        if not Path(corpus_dir).is_dir():
            raise ValueError(f"corpus_dir {corpus_dir!r} is not a directory")
        engine = self.server.engine
        # claim the lock now so a second writer is refused immediately
        token = engine.write_lock.acquire("ingest-job", blocking=False)
        job_id = self.server.next_job_id()

        def run() -> None:
            try:
                from tierkite.ingest.config import IngestConfig
                from tierkite.ingest.ingestor import streaming_ingest

                cfg = IngestConfig(
                    shard_dir=engine.config.engine_dir / "shards",
                    batch_size=engine.config.batch_size,
                    chunk_size=engine.config.chunk_size,
                    overlap=engine.config.overlap,
                    queries_in_flight=engine.queries_in_flight,
                )
                engine.journal.commit({"event": "ingest_start", "job_id": job_id, "corpus": str(corpus_dir)})
                result = streaming_ingest(Path(corpus_dir), engine.config.store_path, cfg)
                engine.journal.commit({"event": "ingest_done", "job_id": job_id, "chunks": result.chunks_kept})
            except Exception as exc:  # job failure is report-only
                logger.exception("ingest job %d failed", job_id)
                engine.journal.commit({"event": "ingest_failed", "job_id": job_id, "error": str(exc)})
            finally:
                token.release()

        threading.Thread(target=run, name=f"tierkite-ingest-{job_id}", daemon=True).start()
        self._send_json(202, {"job_id": job_id})


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8080) -> TierkiteService:
    """Create the service (``serve_forever`` is the caller's loop)."""
    return TierkiteService(engine, host=host, port=port)
