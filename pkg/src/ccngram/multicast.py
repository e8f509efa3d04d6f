"""Per-group multicast state (MART and GMT) on top of a GramRouter.

Groups are named under ``/mcast``. A multicast Interest with ``mc == 0`` is
a join; ``mc >= 1`` pulls object number ``mc`` from the source. No anonymous
identifiers are involved: data follows the group's next hops.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .gram import DEFAULT_SP, SELF, lfr_admits
from .messages import MulticastData, MulticastInterest, MulticastReply, ReplyCode
from .names import ContentName, NamePrefix, prefix_match

MCAST_PREFIX = NamePrefix.parse("/mcast")


def is_group_name(name: ContentName) -> bool:
    return MCAST_PREFIX.matches(name)


@dataclass
class MartEntry:
    group: ContentName
    mc: int = 0
    next_hops: set = field(default_factory=set)


@dataclass
class GmtEntry:
    group: ContentName
    local_receivers: set = field(default_factory=set)


class MulticastState:
    def __init__(self):
        self.mart: dict[ContentName, MartEntry] = {}
        self.gmt: dict[ContentName, GmtEntry] = {}
        self.counters: Counter = Counter()

    def snapshot(self) -> list:
        return [
            {"group": str(g), "mc": e.mc,
             "next_hops": sorted("SELF" if h is SELF else h for h in e.next_hops),
             "local_receivers": sorted(self.gmt[g].local_receivers) if g in self.gmt else []}
            for g, e in sorted(self.mart.items(), key=lambda kv: str(kv[0]))
        ]


def _is_source(router, group: ContentName) -> bool:
    return prefix_match(group, router.produced) is not None


def _fan_out(router, entry: MartEntry, msg) -> list:
    out = []
    for hop in sorted(entry.next_hops, key=lambda h: "" if h is SELF else h):
        if hop is SELF:
            gmt = router.mcast.gmt.get(entry.group)
            if gmt is not None:
                out.extend((c, msg) for c in sorted(gmt.local_receivers))
        else:
            out.append((hop, msg))
    return out


def _upstream(router, mi: MulticastInterest, p, current: int):
    """Copy of ``mi`` toward the source, or a reply to ``p`` (carrying the
    stored counter ``current``) when it cannot be forwarded."""
    entry = router.fib.longest_match(mi.group)
    if entry is None or not entry.ranking:
        return None, (p, MulticastReply(mi.group, ReplyCode.NO_ROUTE, current))
    hit = lfr_admits(entry, mi.distance)
    if hit is None:
        return None, (p, MulticastReply(mi.group, ReplyCode.LOOP, current))
    v, d = hit
    return (v, MulticastInterest(mi.group, d, mi.mc)), None


def handle_multicast_join(router, mi: MulticastInterest, p) -> list:
    ms = router.mcast
    group = mi.group
    from_consumer = p not in router.neighbors
    hop = SELF if from_consumer else p
    entry = ms.mart.get(group)
    out = []
    if entry is None:
        if not _is_source(router, group):
            join = MulticastInterest(group, mi.distance, 0)
            fwd, reply = _upstream(router, join, p, 0)
            if reply is not None:
                ms.counters["join_failed"] += 1
                return [reply]
            out.append(fwd)
            ms.counters["mi_forwarded"] += 1
        entry = ms.mart[group] = MartEntry(group)
    entry.next_hops.add(hop)
    if from_consumer:
        ms.gmt.setdefault(group, GmtEntry(group)).local_receivers.add(p)
    ms.counters["joins"] += 1
    return out


def handle_multicast_pull(router, mi: MulticastInterest, p) -> list:
    ms = router.mcast
    entry = ms.mart.get(mi.group)
    if entry is None:
        return handle_multicast_join(router, mi, p)
    m, v = mi.mc, entry.mc
    if m <= v:
        ms.counters["mi_duplicate"] += 1
        return []
    if m > v + 1:
        ms.counters["mi_gap"] += 1
        return []
    if _is_source(router, mi.group):
        entry.mc = m
        ms.counters["mp_sourced"] += 1
        return _fan_out(router, entry, MulticastData(mi.group, DEFAULT_SP, m, router.payload))
    fwd, reply = _upstream(router, mi, p, v)
    if reply is not None:
        return [reply]
    entry.mc = m
    ms.counters["mi_forwarded"] += 1
    return [fwd]


def handle_multicast_interest(router, mi: MulticastInterest, p) -> list:
    router.counters["mcast_interests_received"] += 1
    entry = router.mcast.mart.get(mi.group)
    hop = p if p in router.neighbors else SELF
    joined = entry is not None and hop in entry.next_hops
    if hop is SELF and joined:
        gmt = router.mcast.gmt.get(mi.group)
        joined = gmt is not None and p in gmt.local_receivers
    out = []
    if not joined:
        out = handle_multicast_join(router, mi, p)
        if mi.group not in router.mcast.mart:
            return out
    if mi.mc == 0:
        return out
    return out + handle_multicast_pull(router, mi, p)


def handle_multicast_data(router, mp: MulticastData, sender) -> list:
    ms = router.mcast
    entry = ms.mart.get(mp.group)
    if entry is None:
        ms.counters["mp_dropped"] += 1
        return []
    if mp.mc > entry.mc:
        entry.mc = mp.mc
    return _fan_out(router, entry, mp)


def handle_multicast_reply(router, mr: MulticastReply, sender) -> list:
    entry = router.mcast.mart.get(mr.group)
    if entry is None:
        router.mcast.counters["mr_dropped"] += 1
        return []
    return _fan_out(router, entry, mr)


def push_next(router, group: ContentName) -> list:
    """Source side of push mode: emit the next object of ``group``."""
    entry = router.mcast.mart.get(group)
    if entry is None:
        return []
    entry.mc += 1
    router.mcast.counters["mp_sourced"] += 1
    return _fan_out(router, entry, MulticastData(group, DEFAULT_SP, entry.mc, router.payload))
