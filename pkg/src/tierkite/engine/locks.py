"""Global write lock and the append-only metadata journal.

One writer at a time (ingest, migration, index build); readers never take
this lock. Job metadata goes through a write-ahead journal: entries are
fsynced before commit returns, and readers parse a point-in-time snapshot
of the file.
"""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path

from tierkite.errors import WouldBlock


class WriteToken:
    def __init__(self, lock: "WriteLock"):
        self._lock = lock
        self._released = False

    def release(self) -> None:
        if not self._released:
            self._released = True
            self._lock._release()


class WriteLock:
    def __init__(self):
        self._lock = threading.Lock()
        self.holder: str | None = None

    def acquire(self, purpose: str = "write", blocking: bool = True, timeout: float | None = None) -> WriteToken:
        if blocking:
            ok = self._lock.acquire(timeout=timeout if timeout is not None else -1)
        else:
            ok = self._lock.acquire(blocking=False)
        if not ok:
            raise WouldBlock(f"write lock held by {self.holder!r}")
        self.holder = purpose
        return WriteToken(self)

    def _release(self) -> None:
        self.holder = None
        self._lock.release()

    def write(self, purpose: str = "write", blocking: bool = True):
        return _WriteContext(self, purpose, blocking)

    @property
    def locked(self) -> bool:
        return self._lock.locked()


class _WriteContext:
    def __init__(self, lock: WriteLock, purpose: str, blocking: bool):
        self._lock = lock
        self._purpose = purpose
        self._blocking = blocking
        self._token: WriteToken | None = None

    def __enter__(self) -> WriteToken:
        self._token = self._lock.acquire(self._purpose, blocking=self._blocking)
        return self._token

    def __exit__(self, *exc) -> None:
        if self._token is not None:
            self._token.release()


class Journal:
    """Append-only NDJSON event log; commit is durable before returning."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._seq = self._scan_seq()

    def _scan_seq(self) -> int:
        if not self.path.exists():
            return 0
        seq = 0
        with open(self.path, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    seq += 1
        return seq

    def commit(self, event: dict) -> int:
        with self._lock:
            self._seq += 1
            record = {"seq": self._seq, "ts": time.time(), **event}
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(json.dumps(record, separators=(",", ":")) + "\n")
                f.flush()
                os.fsync(f.fileno())
            return self._seq

    def entries(self) -> list[dict]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    try:
                        out.append(json.loads(line))
                    except json.JSONDecodeError:
                        continue  # torn tail write; snapshot stops cleanly
        return out
