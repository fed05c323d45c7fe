"""Resident-memory sampling and the bounded-delta report.

The sampler runs on its own timer thread and writes into preallocated ring
buffers so observation never allocates per sample.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

import numpy as np
import psutil

PHASES = ("ingest_start", "post_flush", "ingest_end", "interval")
_PHASE_CODE = {name: i for i, name in enumerate(PHASES)}

DEFAULT_BOUND_BYTES = 500 * 1024 * 1024


@dataclass
class MemorySample:
    t_ms: float
    rss_bytes: int
    phase: str


def current_rss() -> int:
    return psutil.Process().memory_info().rss


class MemorySampler:
    """Fixed-capacity RSS sampler; checkpoint marks interleave with the timer."""

    def __init__(self, interval_s: float = 0.1, capacity: int = 1 << 16):
        self.interval_s = interval_s
        self._t = np.zeros(capacity, dtype=np.float64)
        self._rss = np.zeros(capacity, dtype=np.int64)
        self._phase = np.zeros(capacity, dtype=np.uint8)
        self._n = 0
        self._capacity = capacity
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._t0 = time.monotonic()
        self._proc = psutil.Process()

    def _record(self, phase_code: int) -> None:
        rss = self._proc.memory_info().rss
        now = (time.monotonic() - self._t0) * 1000.0
        with self._lock:
            if self._n >= self._capacity:
                # ring semantics: drop the oldest half of interval samples
                keep = self._phase[: self._n] != _PHASE_CODE["interval"]
                keep |= np.arange(self._n) >= self._n // 2
                kept = int(keep.sum())
                self._t[:kept] = self._t[: self._n][keep]
                self._rss[:kept] = self._rss[: self._n][keep]
                self._phase[:kept] = self._phase[: self._n][keep]
                self._n = kept
            i = self._n
            self._t[i] = now
            self._rss[i] = rss
            self._phase[i] = phase_code
            self._n += 1

    def mark(self, phase: str) -> None:
        self._record(_PHASE_CODE[phase])

    def start(self) -> "MemorySampler":
        self._thread = threading.Thread(target=self._run, name="tierkite-memsampler", daemon=True)
        self._thread.start()
        return self

    def _run(self) -> None:
        while not self._stop.wait(self.interval_s):
            self._record(_PHASE_CODE["interval"])

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)

    def samples(self) -> list[MemorySample]:
        with self._lock:
            n = self._n
            return [
                MemorySample(float(self._t[i]), int(self._rss[i]), PHASES[self._phase[i]])
                for i in range(n)
            ]


def memory_report(samples: list[MemorySample], bound_bytes: int = DEFAULT_BOUND_BYTES) -> dict:
    """Summarize min/max/delta RSS; bounded iff delta stays under the bound."""
    if len(samples) < 2:
        raise ValueError("memory_report requires at least 2 samples")
    rss = np.array([s.rss_bytes for s in samples], dtype=np.int64)
    lo, hi = int(rss.min()), int(rss.max())
    delta = hi - lo
    return {
        "samples": [{"t_ms": s.t_ms, "rss_bytes": s.rss_bytes, "phase": s.phase} for s in samples],
        "min": lo,
        "max": hi,
        "delta": delta,
        "bound": bound_bytes,
        "verdict": "bounded" if delta < bound_bytes else "unbounded",
    }
