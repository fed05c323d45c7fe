"""Lazy-load / eager-unload resource governor.

Components declare a byte estimate at registration; the ledger's invariant
is that the sum of loaded estimates never exceeds the ceiling, checked
before a load happens. Optional components unload least-recently-used
first to make room; if the mandatory set alone cannot fit, the load fails
with an itemized BudgetExceeded.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from tierkite.errors import BudgetExceeded


@dataclass
class Component:
    name: str
    bytes_estimate: int
    mandatory: bool = False
    loaded: bool = False
    last_used: float = 0.0
    loader: object = None    # callable -> handle
    unloader: object = None  # callable(handle)
    handle: object = None


@dataclass
class ResourceLedger:
    ceiling_bytes: int
    components: dict = field(default_factory=dict)
    transitions: list = field(default_factory=list)

    def register(self, name: str, bytes_estimate: int, mandatory: bool = False,
                 loader=None, unloader=None) -> Component:
        comp = Component(name=name, bytes_estimate=bytes_estimate, mandatory=mandatory,
                         loader=loader, unloader=unloader)
        self.components[name] = comp
        return comp

    def loaded_bytes(self) -> int:
        return sum(c.bytes_estimate for c in self.components.values() if c.loaded)

    def loaded_items(self) -> dict:
        return {c.name: c.bytes_estimate for c in self.components.values() if c.loaded}

    def snapshot(self) -> dict:
        return {
            "ceiling_bytes": self.ceiling_bytes,
            "loaded_bytes": self.loaded_bytes(),
            "components": {
                name: {
                    "loaded": c.loaded,
                    "bytes_estimate": c.bytes_estimate,
                    "mandatory": c.mandatory,
                    "idle_s": (time.monotonic() - c.last_used) if c.loaded else None,
                }
                for name, c in self.components.items()
            },
        }


class Governor:
    def __init__(self, ledger: ResourceLedger, idle_unload_seconds: int = 300):
        self.ledger = ledger
        self.idle_unload_seconds = idle_unload_seconds
        self._lock = threading.RLock()

    def _log(self, name: str, action: str) -> None:
        self.ledger.transitions.append((time.time(), name, action))

    def _unload(self, comp: Component) -> None:
        if comp.unloader is not None and comp.handle is not None:
            comp.unloader(comp.handle)
        comp.handle = None
        comp.loaded = False
        self._log(comp.name, "unload")

    def _load(self, comp: Component) -> None:
        projected = self.ledger.loaded_bytes() + comp.bytes_estimate
        if projected > self.ledger.ceiling_bytes:
            # evict optional components, least recently used first
            victims = sorted(
                (c for c in self.ledger.components.values() if c.loaded and not c.mandatory),
                key=lambda c: c.last_used,
            )
            for victim in victims:
                if projected <= self.ledger.ceiling_bytes:
                    break
                self._unload(victim)
                projected -= victim.bytes_estimate
        if projected > self.ledger.ceiling_bytes:
            items = dict(self.ledger.loaded_items())
            items[comp.name] = comp.bytes_estimate
            raise BudgetExceeded(items, self.ledger.ceiling_bytes)
        comp.handle = comp.loader() if comp.loader is not None else True
        comp.loaded = True
        self._log(comp.name, "load")

    def use(self, name: str):
        """Touch a component, loading it transparently; returns its handle."""
        with self._lock:
            comp = self.ledger.components[name]
            if not comp.loaded:
                self._load(comp)
            comp.last_used = time.monotonic()
            return comp.handle

    def tick(self, now: float | None = None) -> list[tuple[str, str]]:
        """Unload components idle past the threshold; returns actions taken."""
        now = time.monotonic() if now is None else now
        actions = []
        with self._lock:
            for comp in self.ledger.components.values():
                if comp.loaded and not comp.mandatory:
                    if now - comp.last_used > self.idle_unload_seconds:
                        self._unload(comp)
                        actions.append((comp.name, "unload"))
        return actions


def governor_tick(governor: Governor, now: float | None = None) -> list[tuple[str, str]]:
    return governor.tick(now)
