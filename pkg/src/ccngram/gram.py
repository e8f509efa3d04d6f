"""CCN-GRAM unicast forwarding: LIGHT, FIB and ART, driven by the loop-free
forwarding rule.

Handlers mutate the router and return the messages to send as a list of
``(destination, message)`` pairs. A destination is either a neighbor router
id or the id of a local consumer.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Optional

from .aid import AidError, AidMapper, ListTable, allocate_aid
from .fib import Fib, FibEntry
from .messages import (
    DataPacket, Distance, Interest, MulticastData, MulticastInterest, MulticastReply,
    Reply, ReplyCode,
)
from .names import ContentName, NamePrefix, prefix_match
from .store import CachingPolicy, ContentStore


class _Self:
    __slots__ = ()

    def __repr__(self) -> str:
        return "SELF"

    def __reduce__(self):
        return "SELF"


SELF = _Self()

DEFAULT_SP = b"\x5a" * 32


class NoRoute(LookupError):
    """No FIB entry matches the requested name."""


@dataclass(slots=True)
class ArtEntry:
    aid: int
    next_hop: Hashable  # neighbor id or SELF
    map: int
    last_used: float = 0.0


@dataclass(slots=True)
class LightEntry:
    name: ContentName
    content_ref: Optional[bytes] = None
    # dict keeps insertion order and gives set semantics
    local_consumers: dict = field(default_factory=dict)


def verify_security_payload(sp: bytes, payload: bytes) -> bool:
    # signature checks are not modelled; the payload is carried opaquely
    return True


def lfr_admits(fib_entry: FibEntry, d_in: Distance):
    """Highest-ranked neighbor ``v`` with ``d_in > D(v)``, as ``(v, D(v))``.

    Returns None when no neighbor satisfies the strict inequality.
    """
    dist = fib_entry.per_neighbor_distance
    for v in fib_entry.ranking:
        d = dist[v]
        if d_in is None or d_in > d:
            return v, d
    return None


class GramRouter:
    def __init__(
        self,
        router_id: str,
        neighbors,
        list_table: ListTable,
        epsilon: int,
        *,
        store_capacity: int = 0,
        caching: CachingPolicy = CachingPolicy.NONE,
        payload_size: int = 1024,
    ):
        self.id = router_id
        self.neighbors = frozenset(neighbors)
        self.list = list_table
        self.mapper = AidMapper(epsilon, list_table)
        self.fib = Fib()
        self.art: dict[int, ArtEntry] = {}
        # (next hop, upstream AID) -> ART key, so reuse checks are O(1)
        self._art_index: dict[tuple, int] = {}
        self.light: dict[ContentName, LightEntry] = {}
        self.self_aid: Optional[int] = None
        self.store = ContentStore(store_capacity)
        self.caching = caching
        self.produced: dict[NamePrefix, object] = {}
        self.payload = bytes(payload_size)
        self.counters: Counter = Counter()
        self.now = 0.0
        from .multicast import MulticastState  # local import: multicast builds on this module
        self.mcast = MulticastState()

    def __repr__(self) -> str:
        return f"GramRouter({self.id!r}, art={len(self.art)}, light={len(self.light)})"

    # -- setup ---------------------------------------------------------

    def produce(self, prefix: NamePrefix, objects) -> None:
        """Advertise ``prefix``; ``objects`` must support ``name in objects``."""
        self.produced[prefix] = objects

    def add_route(self, prefix: NamePrefix, neighbor, distance: int) -> None:
        if neighbor not in self.neighbors:
            raise ValueError(f"{neighbor!r} is not a neighbor of {self.id}")
        self.fib.add_route(prefix, neighbor, distance)

    def distance_to(self, prefix: NamePrefix) -> Optional[int]:
        if prefix in self.produced:
            return 0
        if prefix in self.fib:
            ranking = self.fib[prefix].ranked()
            return ranking[0][1] if ranking else None
        return None

    # -- table views ---------------------------------------------------

    def _local_content(self, name: ContentName) -> Optional[bytes]:
        payload = self.store.lookup(name)
        if payload is not None:
            return payload
        prefix = prefix_match(name, self.produced)
        if prefix is not None and name in self.produced[prefix]:
            return self.payload
        return None

    def _produces_prefix_of(self, name: ContentName) -> bool:
        return prefix_match(name, self.produced) is not None

    def light_entry(self, name: ContentName) -> Optional[LightEntry]:
        """LIGHT view: pending local requests plus locally stored content."""
        pending = self.light.get(name)
        if pending is not None:
            return pending
        payload = self._local_content(name)
        if payload is not None:
            return LightEntry(name, payload)
        return None

    def lfr_admits(self, prefix: NamePrefix, d_in: Distance):
        """Admitted neighbor id for ``prefix`` or None; raises NoRoute if the
        prefix is not in the FIB."""
        if prefix not in self.fib:
            raise NoRoute(prefix)
        hit = lfr_admits(self.fib[prefix], d_in)
        return None if hit is None else hit[0]

    # -- ART -------------------------------------------------------------

    def _add_art(self, aid: int, next_hop, mapped: int) -> None:
        self.art[aid] = ArtEntry(aid, next_hop, mapped, self.now)
        self._art_index[(next_hop, mapped)] = aid

    def _establish_self_aid(self) -> Optional[int]:
        if self.self_aid is None:
            a = allocate_aid(self.art, self.list.own)
            if a is None:
                return None
            self.self_aid = a
            self._add_art(a, SELF, a)
        return self.self_aid

    def _art_key_for(self, aid: int, p) -> Optional[int]:
        key = self._art_index.get((p, aid))
        if key is not None:
            self.art[key].last_used = self.now
            return key
        if aid not in self.art:
            self._add_art(aid, p, aid)
            return aid
        # collision: the AID already names another flow
        self.counters["aid_collisions"] += 1
        a = allocate_aid(self.art, self.list.own)
        if a is None:
            return None
        self._add_art(a, p, aid)
        return a

    def expire_art(self, now: float, idle: float) -> int:
        stale = [e for e in self.art.values()
                 if e.next_hop is not SELF and now - e.last_used > idle]
        for e in stale:
            del self.art[e.aid]
            self._art_index.pop((e.next_hop, e.map), None)
        self.counters["art_expired"] += len(stale)
        return len(stale)

    # -- dispatch --------------------------------------------------------

    def receive(self, msg, sender) -> list:
        from . import multicast as mc

        kind = type(msg)
        if kind is Interest:
            if sender in self.neighbors:
                return self.handle_neighbor_interest(msg, sender)
            return self.handle_consumer_interest(msg, sender)
        if kind is DataPacket:
            return self.handle_data(msg, sender)
        if kind is Reply:
            return self.handle_reply(msg, sender)
        if kind is MulticastInterest:
            return mc.handle_multicast_interest(self, msg, sender)
        if kind is MulticastData:
            return mc.handle_multicast_data(self, msg, sender)
        if kind is MulticastReply:
            return mc.handle_multicast_reply(self, msg, sender)
        self.counters["dropped_unknown_type"] += 1
        return []

    # -- Interests from local consumers --------------------------------

    def handle_consumer_interest(self, interest: Interest, c) -> list:
        self.counters["interests_received"] += 1
        name = interest.name
        if not isinstance(name, ContentName):
            self.counters["dropped_malformed"] += 1
            return []
        payload = self._local_content(name)
        if payload is not None:
            self.counters["local_hits"] += 1
            return [(c, DataPacket(name, c, DEFAULT_SP, payload))]
        pending = self.light.get(name)
        if pending is not None:
            pending.local_consumers[c] = None
            self.counters["interests_aggregated"] += 1
            return []
        if self._produces_prefix_of(name):
            return [(c, Reply(name, c, ReplyCode.NO_CONTENT))]
        entry = self.fib.longest_match(name)
        if entry is None or not entry.ranking:
            return [(c, Reply(name, c, ReplyCode.NO_ROUTE))]
        me = self._establish_self_aid()
        if me is None:
            self.counters["aid_exhausted"] += 1
            return [(c, Reply(name, c, ReplyCode.NO_ROUTE))]
        self.light[name] = LightEntry(name, None, {c: None})
        self.art[me].last_used = self.now
        v, d = lfr_admits(entry, None)
        self.counters["interests_forwarded"] += 1
        return [(v, Interest(name, self.mapper.map_forward(me, v), d))]

    # -- Interests from neighbor routers -------------------------------

    def handle_neighbor_interest(self, interest: Interest, p) -> list:
        self.counters["interests_received"] += 1
        name = interest.name
        aid = interest.aid
        if p not in self.neighbors or aid not in self.list.own:
            self.counters["dropped_bad_aid"] += 1
            return []
        payload = self._local_content(name)
        if payload is not None:
            self.counters["cache_hits"] += 1
            return [(p, DataPacket(name, aid, DEFAULT_SP, payload))]
        if self._produces_prefix_of(name):
            return [(p, Reply(name, aid, ReplyCode.NO_CONTENT))]
        entry = self.fib.longest_match(name)
        if entry is None or not entry.ranking:
            return [(p, Reply(name, aid, ReplyCode.NO_ROUTE))]
        hit = lfr_admits(entry, interest.distance)
        if hit is None:
            self.counters["lfr_rejections"] += 1
            return [(p, Reply(name, aid, ReplyCode.LOOP))]
        s, d = hit
        key = self._art_key_for(aid, p)
        if key is None:
            self.counters["aid_exhausted"] += 1
            return [(p, Reply(name, aid, ReplyCode.NO_ROUTE))]
        self.counters["interests_forwarded"] += 1
        return [(s, Interest(name, self.mapper.map_forward(key, s), d))]

    # -- responses -----------------------------------------------------

    def _reverse_entry(self, aid, s) -> Optional[ArtEntry]:
        if s not in self.neighbors:
            return None
        try:
            a = self.mapper.map_inverse(aid, s)
        except AidError:
            return None
        entry = self.art.get(a)
        if entry is not None:
            entry.last_used = self.now
        return entry

    def handle_data(self, pkt: DataPacket, s) -> list:
        if not verify_security_payload(pkt.security_payload, pkt.payload):
            self.counters["dropped_unverified"] += 1
            return []
        entry = self._reverse_entry(pkt.aid, s)
        if entry is None:
            self.counters["dropped_data_no_art"] += 1
            return []
        name = pkt.name
        out = []
        origin = entry.next_hop is SELF
        if origin:
            pending = self.light.pop(name, None)
            if pending is not None:
                for c in pending.local_consumers:
                    out.append((c, DataPacket(name, c, pkt.security_payload, pkt.payload)))
        elif entry.next_hop in self.neighbors:
            out.append((entry.next_hop, DataPacket(name, entry.map, pkt.security_payload, pkt.payload)))
        if self.caching.caches_at(origin):
            self.store.insert(name, pkt.payload)
        return out

    def handle_reply(self, rep: Reply, s) -> list:
        entry = self._reverse_entry(rep.aid, s)
        if entry is None:
            self.counters["dropped_reply_no_art"] += 1
            return []
        name = rep.name
        if entry.next_hop is SELF:
            pending = self.light.pop(name, None)
            if pending is None:
                return []
            return [(c, Reply(name, c, rep.code)) for c in pending.local_consumers]
        if entry.next_hop in self.neighbors:
            return [(entry.next_hop, Reply(name, entry.map, rep.code))]
        return []

    # -- snapshots -----------------------------------------------------

    def table_sizes(self) -> dict:
        return {"art": len(self.art), "light": len(self.light),
                "mart": len(self.mcast.mart), "cs": len(self.store)}

    def snapshot(self) -> dict:
        """Structured dump of tables and counters (epsilon excluded)."""
        return {
            "router": self.id,
            "plane": "gram",
            "sizes": self.table_sizes(),
            "self_aid": self.self_aid,
            "art": [
                {"aid": e.aid, "next_hop": "SELF" if e.next_hop is SELF else e.next_hop, "map": e.map}
                for e in sorted(self.art.values(), key=lambda e: e.aid)
            ],
            "light": {
                str(n): sorted(e.local_consumers) for n, e in sorted(self.light.items(), key=lambda kv: str(kv[0]))
            },
            "mart": self.mcast.snapshot(),
            "counters": dict(sorted(self.counters.items())),
        }
