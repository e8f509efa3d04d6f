"""Single-threaded discrete-event core and the link model.

Time is in milliseconds. Events with equal timestamps run in the order they
were scheduled.
"""
from __future__ import annotations

import heapq
from typing import Callable, Optional

from .messages import to_record

DEFAULT_MAX_EVENTS = 50_000_000


class QueueOverflow(RuntimeError):
    pass


class Simulator:
    def __init__(self, max_pending: int = DEFAULT_MAX_EVENTS):
        self.now = 0.0
        self._queue: list = []
        self._seq = 0
        self.max_pending = max_pending
        self.dispatched = 0

    def __len__(self) -> int:
        return len(self._queue)

    def at(self, time: float, fn: Callable, *args) -> None:
        if time < self.now:
            raise ValueError(f"cannot schedule at {time} before now={self.now}")
        if len(self._queue) >= self.max_pending:
            raise QueueOverflow(
                f"{len(self._queue)} pending events at t={self.now:.3f} ms "
                f"(bound {self.max_pending}); reduce the rate or raise max_events")
        heapq.heappush(self._queue, (time, self._seq, fn, args))
        self._seq += 1

    def after(self, delay: float, fn: Callable, *args) -> None:
        self.at(self.now + delay, fn, *args)

    def run(self, until: Optional[float] = None) -> None:
        queue = self._queue
        pop = heapq.heappop
        while queue:
            if until is not None and queue[0][0] > until:
                self.now = until
                return
            time, _, fn, args = pop(queue)
            self.now = time
            self.dispatched += 1
            fn(*args)
        if until is not None:
            self.now = max(self.now, until)


class Network:
    """Routers joined by FIFO point-to-point links.

    A message sent at ``t`` on a link leaves once the link is free, takes
    ``size * 8 / rate`` to serialize, then ``delay`` to propagate. Messages
    addressed to a non-neighbor go to the router's local consumer endpoint
    with zero delay.

    Every delivery carries an opaque ``tag``; messages a router emits while
    handling a tagged message inherit that tag. Only observers see tags.
    """

    def __init__(self, sim: Simulator, routers: dict, link_map: dict):
        self.sim = sim
        self.routers = routers
        self._links = {}
        for (a, b), link in link_map.items():
            self._links[(a, b)] = [link.delay_ms, link.rate_bps / 1000.0, 0.0]  # bits per ms
        self.consumer_endpoints: dict = {}  # router id -> callable(consumer_id, msg, tag)
        self.observers: list = []
        self.deliveries = 0
        self.local_deliveries = 0

    def attach_consumers(self, router_id: str, endpoint: Callable) -> None:
        self.consumer_endpoints[router_id] = endpoint

    def inject(self, router_id: str, msg, sender, tag=None) -> None:
        """Hand ``msg`` from a local consumer ``sender`` to its router now."""
        self.sim.at(self.sim.now, self._deliver, router_id, msg, sender, tag, True)

    def emit(self, src: str, emissions: list, tag=None) -> None:
        sim = self.sim
        now = sim.now
        links = self._links
        for dst, msg in emissions:
            link = links.get((src, dst))
            if link is None:
                sim.at(now, self._to_consumer, src, dst, msg, tag)
                continue
            delay, bits_per_ms, busy = link
            start = busy if busy > now else now
            done = start + msg.size * 8 / bits_per_ms
            link[2] = done
            sim.at(done + delay, self._deliver, dst, msg, src, tag, False)

    def _deliver(self, dst: str, msg, src, tag, local: bool) -> None:
        if local:
            self.local_deliveries += 1
        else:
            self.deliveries += 1
        for obs in self.observers:
            obs(self.sim.now, src, dst, msg, tag, local)
        router = self.routers[dst]
        router.now = self.sim.now
        out = router.receive(msg, src)
        if out:
            self.emit(dst, out, tag)

    def _to_consumer(self, router_id: str, consumer, msg, tag) -> None:
        self.local_deliveries += 1
        for obs in self.observers:
            obs(self.sim.now, router_id, consumer, msg, tag, True)
        endpoint = self.consumer_endpoints.get(router_id)
        if endpoint is not None:
            endpoint(consumer, msg, tag)


class TraceWriter:
    """Observer writing one JSON record per delivery."""

    def __init__(self, stream, include_local: bool = True):
        import json

        self._dumps = json.dumps
        self.stream = stream
        self.include_local = include_local

    def __call__(self, t, src, dst, msg, tag, local) -> None:
        if local and not self.include_local:
            return
        rec = {"t": round(t, 9), "from": src, "to": dst, "local": local, "msg": to_record(msg)}
        self.stream.write(self._dumps(rec, sort_keys=True) + "\n")
