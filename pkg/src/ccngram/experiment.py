"""Assemble a scenario into routers, links and applications, and run it."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import multicast as mcast
from .aid import ListTable, LocalInterval
from .engine import Network, Simulator, TraceWriter
from .gram import GramRouter
from .messages import (
    DataPacket, Interest, MulticastData, MulticastInterest, MulticastReply, NdnData,
    NdnInterest, Nack, Reply,
)
from .metrics import TABLE_KINDS, DelayStats, MetricsBundle, TableSampler, measure_aggregation
from .names import ContentName, NamePrefix
from .ndn import NdnRouter
from .scenario import Scenario
from .topology import compute_routes, generate_topology, install_routes, topology_from_edges
from .workload import Catalog, TemporalLocality, Workload


def build_topology(s: Scenario):
    t = s.topology
    if t.edges is not None:
        return topology_from_edges([tuple(e) for e in t.edges], t.delay_ms, t.rate_bps)
    seed = t.seed if t.seed is not None else f"{s.seed}:placement"
    return generate_topology(t.routers, t.area, t.radius, t.delay_ms, t.rate_bps, seed)


def assign_roles(s: Scenario, routers: list) -> tuple:
    """(producer ids, consumer ids). Drawn roles are disjoint."""
    w = s.workload
    rng = random.Random(f"{s.seed}:roles")
    pool = sorted(routers)
    if isinstance(w.producer_routers, list):
        producers = list(w.producer_routers)
    elif w.producer_routers == "all":
        producers = list(pool)
    else:
        producers = sorted(rng.sample(pool, w.producer_routers))
    if isinstance(w.consumer_routers, list):
        consumers = list(w.consumer_routers)
    elif w.consumer_routers == "all":
        consumers = list(pool)
    else:
        rest = [r for r in pool if r not in producers]
        consumers = sorted(rng.sample(rest, w.consumer_routers))
    unknown = [r for r in producers + consumers if r not in routers]
    if unknown:
        raise ValueError(f"unknown routers in roles: {unknown}")
    return producers, consumers


class ConsumerApp:
    """Aggregate consumer process of one router: Poisson requests, one
    synthetic user id per request, retransmission on timeout."""

    def __init__(self, run: "Run", router_id: str, stream, rate: float):
        self.run = run
        self.router_id = router_id
        self.stream = stream
        self.gap_ms = 1000.0 / rate
        self.rate = rate
        self.seq = 0
        self.outstanding: dict = {}
        self.rtt_est = run.scenario.consumer.initial_rtt_ms
        self.nonces = random.Random(f"{run.scenario.seed}:nonce:{router_id}")
        self.gram = run.plane == "gram"

    def start(self) -> None:
        self.run.sim.after(self.stream.interarrival_ms(self.rate), self._request)

    def _request(self) -> None:
        run = self.run
        sim = run.sim
        now = sim.now
        if now >= run.end_ms:
            return
        name = self.stream.draw_request(now)
        self.seq += 1
        uid = f"{self.router_id}.u{self.seq}"
        self.outstanding[uid] = [name, now, 1]
        if now >= run.warmup_ms:
            run.delay.issued += 1
        self._send(uid, name, 1)
        sim.after(self.stream.interarrival_ms(self.rate), self._request)

    def _send(self, uid: str, name: ContentName, attempt: int) -> None:
        if self.gram:
            msg = Interest(name, uid, None)
        else:
            msg = NdnInterest(name, self.nonces.getrandbits(64))
        self.run.net.inject(self.router_id, msg, uid, (self.router_id, uid, attempt))
        cfg = self.run.scenario.consumer
        if cfg.retransmit:
            timeout = max(2.0 * self.rtt_est, cfg.min_timeout_ms)
            self.run.sim.after(timeout, self._timeout, uid, attempt)

    def _timeout(self, uid: str, attempt: int) -> None:
        rec = self.outstanding.get(uid)
        if rec is None or rec[2] != attempt:
            return
        if attempt < self.run.scenario.consumer.max_tries:
            rec[2] = attempt + 1
            if rec[1] >= self.run.warmup_ms:
                self.run.delay.retransmissions += 1
            self._send(uid, rec[0], attempt + 1)
        else:
            del self.outstanding[uid]
            if rec[1] >= self.run.warmup_ms:
                self.run.delay.failures["timeout"] += 1

    def deliver(self, uid, msg, tag) -> None:
        rec = self.outstanding.pop(uid, None)
        if rec is None:
            return
        run = self.run
        measured = rec[1] >= run.warmup_ms
        if type(msg) in (DataPacket, NdnData):
            delay = run.sim.now - rec[1]
            if measured:
                run.delay.delays.append(delay)
                if run.per_request is not None:
                    run.per_request.append((uid, rec[1], run.sim.now, rec[2]))
            if delay > 0 and rec[2] == 1:
                self.rtt_est = 0.875 * self.rtt_est + 0.125 * delay
        elif measured:
            code = msg.code.value if type(msg) is Reply else msg.reason.value
            run.delay.failures[code] += 1


class MulticastReceivers:
    """Local receivers of one group at one router."""

    def __init__(self, run: "Run", router_id: str, group: ContentName, count: int, cfg):
        self.run = run
        self.router_id = router_id
        self.group = group
        self.cfg = cfg
        self.ids = [f"{router_id}.m{i}" for i in range(count)]
        self.expected = {rid: 1 for rid in self.ids}
        self.received: dict = {rid: set() for rid in self.ids}
        self.replies: list = []

    def start(self) -> None:
        self.run.sim.at(self.cfg.start_ms, self._join)

    def _join(self) -> None:
        for rid in self.ids:
            self.run.net.inject(self.router_id, MulticastInterest(self.group, None, 0), rid, ("mjoin", rid))
            if self.cfg.mode == "pull":
                self._pull(rid, 1)

    def _pull(self, rid: str, mc: int) -> None:
        self.run.net.inject(self.router_id, MulticastInterest(self.group, None, mc), rid, ("mpull", rid, mc))

    def deliver(self, rid, msg, tag) -> None:
        if type(msg) is MulticastReply:
            self.replies.append((rid, msg))
            return
        got = self.received[rid]
        if msg.mc in got:
            return
        got.add(msg.mc)
        if self.cfg.mode == "pull" and msg.mc == self.expected[rid]:
            self.expected[rid] = msg.mc + 1
            if msg.mc < self.cfg.objects:
                self._pull(rid, msg.mc + 1)


@dataclass
class RunResult:
    metrics: MetricsBundle
    routers: dict
    topology: object
    producers: list
    consumers: list
    receivers: list = field(default_factory=list)


class Run:
    def __init__(self, scenario: Scenario, plane: str, *, trace=None, observers=(),
                 record_requests: bool = False):
        self.scenario = s = scenario
        self.plane = plane
        self.sim = Simulator(max_pending=s.max_events)
        self.warmup_ms = 1000.0 * s.warmup_s
        self.end_ms = s.duration_ms
        self.delay = DelayStats()
        self.per_request = [] if record_requests else None

        self.topology = build_topology(s)
        ids = sorted(self.topology.positions)
        nbrs = self.topology.neighbors()
        self.producers, self.consumers = assign_roles(s, ids)
        w = s.workload
        self.catalog = Catalog(w.catalog_size, len(self.producers), w.prefixes_per_producer)
        cache_objects = s.cache.objects(w.catalog_size)

        self.routers: dict = {}
        if plane == "gram":
            length = s.aid.interval_length
            intervals = {r: LocalInterval(int(s.aid.interval_start.get(r, 0)), length) for r in ids}
            eps_seed = s.aid.epsilon_seed if s.aid.epsilon_seed is not None else s.seed
            for r in ids:
                table = ListTable(intervals[r], {v: intervals[v] for v in nbrs[r]})
                eps = random.Random(f"{eps_seed}:epsilon:{r}").randrange(length)
                self.routers[r] = GramRouter(r, nbrs[r], table, eps, store_capacity=cache_objects,
                                             caching=s.cache.mode, payload_size=w.payload_size)
        else:
            for r in ids:
                self.routers[r] = NdnRouter(r, nbrs[r], store_capacity=cache_objects,
                                            caching=s.cache.mode, pit_lifetime=s.pit_lifetime_ms,
                                            payload_size=w.payload_size)

        produced = {}
        for idx, r in enumerate(self.producers):
            for slot, prefix in enumerate(self.catalog.prefixes_of(idx)):
                self.routers[r].produce(prefix, self.catalog.objects(idx, slot))
                produced.setdefault(r, []).append(prefix)
        groups = s.multicast if plane == "gram" else []
        for g in groups:
            gname = ContentName.parse(g.name)
            gprefix = NamePrefix(gname.components)
            self.routers[g.source].produce(gprefix, ())
            produced.setdefault(g.source, []).append(gprefix)
        routes = compute_routes(self.topology, produced,
                                adversarial=s.routing.mode == "adversarial",
                                max_distance=s.routing.max_distance, seed=f"{s.seed}:routing")
        install_routes(self.routers, routes)

        self.net = Network(self.sim, self.routers, self.topology.link_map())
        self.trace_writer = None
        if trace is not None:
            self.trace_writer = TraceWriter(trace)
            self.net.observers.append(self.trace_writer)
        self.net.observers.extend(observers)

        self.workload = Workload(
            self.catalog, w.zipf_alpha, s.seed,
            locality=TemporalLocality(w.temporal_locality, w.locality_period_s, w.hot_set_size)
            if w.temporal_locality > 0 else None,
            duplicate_prob=w.duplicate_prob,
        )
        self.apps: dict = {}
        for r in self.consumers:
            self.apps[r] = ConsumerApp(self, r, self.workload.stream(r), w.rate)
        self.receivers: list = []
        for g in groups:
            gname = ContentName.parse(g.name)
            for r, count in sorted(g.receivers.items()):
                self.receivers.append(MulticastReceivers(self, r, gname, int(count), g))
            if g.mode == "push":
                start = g.data_start_ms if g.data_start_ms is not None else g.start_ms + 1000.0
                self.sim.at(start, self._push, g.source, gname, g.objects, g.interval_ms)
        self._endpoints()
        self.sampler = TableSampler(ids)
        self._counters_at_warmup: Optional[dict] = None

    def _endpoints(self) -> None:
        by_router: dict = {}
        for r, app in self.apps.items():
            by_router.setdefault(r, []).append(("u", app))
        for rx in self.receivers:
            by_router.setdefault(rx.router_id, []).append(("m", rx))

        for r, handlers in by_router.items():
            unicast = next((h for kind, h in handlers if kind == "u"), None)
            mrx = {rid: h for kind, h in handlers if kind == "m" for rid in h.ids}

            def endpoint(cid, msg, tag, unicast=unicast, mrx=mrx):
                rx = mrx.get(cid)
                if rx is not None:
                    rx.deliver(cid, msg, tag)
                elif unicast is not None:
                    unicast.deliver(cid, msg, tag)

            self.net.attach_consumers(r, endpoint)

    def _push(self, source: str, group: ContentName, remaining: int, interval: float) -> None:
        if remaining <= 0:
            return
        router = self.routers[source]
        router.now = self.sim.now
        self.net.emit(source, mcast.push_next(router, group), ("mpush", source))
        self.sim.after(interval, self._push, source, group, remaining - 1, interval)

    def _sample(self) -> None:
        now = self.sim.now
        idle = self.scenario.art_idle_timeout_ms
        for router in self.routers.values():
            if self.plane == "ndn":
                router.expire_pit(now)
            elif idle is not None:
                router.expire_art(now, idle)
        self.sampler.sample(now, self.routers)
        nxt = now + self.scenario.sample_interval_ms
        if nxt <= self.end_ms:
            self.sim.at(nxt, self._sample)

    def _counter_totals(self) -> Counter:
        total = Counter()
        for router in self.routers.values():
            total.update(router.counters)
            if self.plane == "gram":
                total.update(router.mcast.counters)
        return total

    def _mark_warmup(self) -> None:
        self._counters_at_warmup = self._counter_totals()

    def execute(self) -> RunResult:
        for app in self.apps.values():
            app.start()
        for rx in self.receivers:
            rx.start()
        self.sim.at(self.warmup_ms, self._mark_warmup)
        self.sim.at(self.warmup_ms, self._sample)
        self.sim.run(until=self.end_ms)
        return self._finish()

    def _finish(self) -> RunResult:
        s = self.scenario
        end = self._counter_totals()
        start = self._counters_at_warmup or Counter()
        window = Counter({k: end[k] - start.get(k, 0) for k in end})
        received = window["interests_received"]
        aggregated = window["interests_aggregated"]
        for app in self.apps.values():
            self.delay.unfinished += sum(1 for rec in app.outstanding.values() if rec[1] >= self.warmup_ms)
        means, stds = {}, {}
        for k in TABLE_KINDS:
            means[k], stds[k] = self.sampler.summary(k)
        keys = {
            "scenario": s.name,
            "seed": s.seed,
            "rate": s.workload.rate,
            "alpha": s.workload.zipf_alpha,
            "caching": s.cache.mode.value,
            "cache_objects": s.cache.objects(s.workload.catalog_size),
            "locality": s.workload.temporal_locality,
            "routers": len(self.routers),
        }
        bundle = MetricsBundle(
            plane=self.plane, keys=keys,
            interests_received=received, interests_aggregated=aggregated,
            aggregation_pct=measure_aggregation(received, aggregated),
            table_means=means, table_stds=stds, delay=self.delay,
            counters=window, events=self.sim.dispatched, series=self.sampler.series,
        )
        return RunResult(bundle, self.routers, self.topology, self.producers, self.consumers,
                         self.receivers)


def run(scenario: Scenario, plane: Optional[str] = None, **kwargs) -> RunResult:
    """Run one plane of ``scenario`` (the first listed plane by default)."""
    return Run(scenario, plane or scenario.plane[0], **kwargs).execute()
