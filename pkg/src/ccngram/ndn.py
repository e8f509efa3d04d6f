"""Baseline NDN forwarding with a pending interest table.

Same handler contract as :class:`ccngram.gram.GramRouter`: handlers return a
list of ``(interface, message)`` pairs, where an interface is a neighbor id
or a local consumer id.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .fib import Fib
from .gram import DEFAULT_SP
from .messages import Nack, NackReason, NdnData, NdnInterest
from .names import ContentName, NamePrefix, prefix_match
from .store import CachingPolicy, ContentStore

DEFAULT_PIT_LIFETIME_MS = 2000.0


@dataclass
class PitEntry:
    name: ContentName
    records: dict = field(default_factory=dict)  # nonce -> in-interface
    out_interfaces: set = field(default_factory=set)
    expiry: float = 0.0

    def interfaces(self) -> list:
        seen = {}
        for iface in self.records.values():
            seen.setdefault(iface, None)
        return list(seen)


class NdnRouter:
    def __init__(
        self,
        router_id: str,
        neighbors,
        *,
        store_capacity: int = 0,
        caching: CachingPolicy = CachingPolicy.NONE,
        pit_lifetime: float = DEFAULT_PIT_LIFETIME_MS,
        payload_size: int = 1024,
    ):
        self.id = router_id
        self.neighbors = frozenset(neighbors)
        self.fib = Fib()
        self.pit: dict[ContentName, PitEntry] = {}
        self.store = ContentStore(store_capacity)
        self.caching = caching
        self.pit_lifetime = pit_lifetime
        self.produced: dict[NamePrefix, object] = {}
        self.payload = bytes(payload_size)
        self.counters: Counter = Counter()
        self.now = 0.0

    def __repr__(self) -> str:
        return f"NdnRouter({self.id!r}, pit={len(self.pit)})"

    def produce(self, prefix: NamePrefix, objects) -> None:
        self.produced[prefix] = objects

    def add_route(self, prefix: NamePrefix, neighbor, distance: int) -> None:
        if neighbor not in self.neighbors:
            raise ValueError(f"{neighbor!r} is not a neighbor of {self.id}")
        self.fib.add_route(prefix, neighbor, distance)

    def _local_content(self, name: ContentName) -> Optional[bytes]:
        payload = self.store.lookup(name)
        if payload is not None:
            return payload
        prefix = prefix_match(name, self.produced)
        if prefix is not None and name in self.produced[prefix]:
            return self.payload
        return None

    def _live_entry(self, name: ContentName) -> Optional[PitEntry]:
        entry = self.pit.get(name)
        if entry is not None and entry.expiry <= self.now:
            del self.pit[name]
            self.counters["pit_expired"] += 1
            return None
        return entry

    def receive(self, msg, iface) -> list:
        kind = type(msg)
        if kind is NdnInterest:
            return self.handle_interest(msg, iface)
        if kind is NdnData:
            return self.handle_data(msg, iface)
        if kind is Nack:
            return self.handle_nack(msg, iface)
        self.counters["dropped_unknown_type"] += 1
        return []

    def handle_interest(self, interest: NdnInterest, in_iface) -> list:
        self.counters["interests_received"] += 1
        name = interest.name
        payload = self._local_content(name)
        if payload is not None:
            self.counters["cache_hits" if in_iface in self.neighbors else "local_hits"] += 1
            return [(in_iface, NdnData(name, DEFAULT_SP, payload))]
        entry = self._live_entry(name)
        if entry is not None:
            if interest.nonce in entry.records:
                self.counters["duplicate_nonce"] += 1
                return [(in_iface, Nack(name, interest.nonce, NackReason.DUPLICATE))]
            entry.records[interest.nonce] = in_iface
            self.counters["interests_aggregated"] += 1
            return []
        if prefix_match(name, self.produced) is not None:
            return [(in_iface, Nack(name, interest.nonce, NackReason.NO_CONTENT))]
        fib_entry = self.fib.longest_match(name)
        out = None
        if fib_entry is not None:
            for v in fib_entry.ranking:
                if v != in_iface:
                    out = v
                    break
        if out is None:
            return [(in_iface, Nack(name, interest.nonce, NackReason.NO_ROUTE))]
        self.pit[name] = PitEntry(name, {interest.nonce: in_iface}, {out}, self.now + self.pit_lifetime)
        self.counters["interests_forwarded"] += 1
        return [(out, interest)]

    def handle_data(self, data: NdnData, in_iface) -> list:
        entry = self._live_entry(data.name)
        if entry is None:
            self.counters["dropped_unsolicited"] += 1
            return []
        del self.pit[data.name]
        ifaces = entry.interfaces()
        origin = any(i not in self.neighbors for i in ifaces)
        if self.caching.caches_at(origin):
            self.store.insert(data.name, data.payload)
        return [(i, data) for i in ifaces]

    def handle_nack(self, nack: Nack, in_iface) -> list:
        entry = self._live_entry(nack.name)
        if entry is None or in_iface not in entry.out_interfaces:
            self.counters["dropped_nack"] += 1
            return []
        del self.pit[nack.name]
        return [(i, Nack(nack.name, nonce, nack.reason)) for nonce, i in entry.records.items()]

    def expire_pit(self, now: float) -> int:
        self.now = now
        dead = [n for n, e in self.pit.items() if e.expiry <= now]
        for n in dead:
            del self.pit[n]
        self.counters["pit_expired"] += len(dead)
        return len(dead)

    def table_sizes(self) -> dict:
        return {"pit": len(self.pit), "cs": len(self.store)}

    def snapshot(self) -> dict:
        return {
            "router": self.id,
            "plane": "ndn",
            "sizes": self.table_sizes(),
            "pit": {
                str(n): {"records": [[nonce, i] for nonce, i in e.records.items()],
                         "out": sorted(e.out_interfaces), "expiry": e.expiry}
                for n, e in sorted(self.pit.items(), key=lambda kv: str(kv[0]))
            },
            "counters": dict(sorted(self.counters.items())),
        }


def ndn_expire_pit(router: NdnRouter, now: float) -> int:
    return router.expire_pit(now)
