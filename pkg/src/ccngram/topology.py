"""Random geometric topologies and static hop-count routes."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import networkx as nx

from .names import NamePrefix

MAX_ROUTERS = 5000
MAX_PLACEMENT_ATTEMPTS = 1000


class TopologyError(ValueError):
    pass


@dataclass
class Link:
    a: str
    b: str
    delay_ms: float
    rate_bps: float


@dataclass
class Topology:
    positions: dict  # router id -> (x, y)
    links: list = field(default_factory=list)

    @property
    def routers(self) -> list:
        return list(self.positions)

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.positions)
        g.add_edges_from((l.a, l.b) for l in self.links)
        return g

    def neighbors(self) -> dict:
        out = {r: set() for r in self.positions}
        for l in self.links:
            out[l.a].add(l.b)
            out[l.b].add(l.a)
        return out

    def link_map(self) -> dict:
        """(src, dst) -> Link, for both directions."""
        m = {}
        for l in self.links:
            m[(l.a, l.b)] = l
            m[(l.b, l.a)] = l
        return m

    def is_connected(self) -> bool:
        return len(self.positions) > 0 and nx.is_connected(self.graph())


def router_ids(n: int) -> list:
    width = max(2, len(str(n - 1)))
    return [f"r{i:0{width}d}" for i in range(n)]


def generate_topology(n: int, area: float, radius: float, delay_ms: float,
                      rate_bps: float, seed) -> Topology:
    """Uniform placement in an ``area`` x ``area`` square; routers within
    ``radius`` of each other are linked. Placement is redrawn until the graph
    is connected."""
    if n < 2:
        raise TopologyError("need at least two routers")
    if n > MAX_ROUTERS:
        raise TopologyError(f"{n} routers exceeds the limit of {MAX_ROUTERS}")
    rng = random.Random(seed)
    ids = router_ids(n)
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        pos = {r: (rng.uniform(0, area), rng.uniform(0, area)) for r in ids}
        links = []
        for i, a in enumerate(ids):
            ax, ay = pos[a]
            for b in ids[i + 1:]:
                bx, by = pos[b]
                if math.hypot(ax - bx, ay - by) <= radius:
                    links.append(Link(a, b, delay_ms, rate_bps))
        topo = Topology(pos, links)
        if topo.is_connected():
            return topo
    raise TopologyError(f"no connected placement after {MAX_PLACEMENT_ATTEMPTS} attempts; radius too small?")


def topology_from_edges(edges, delay_ms: float, rate_bps: float, nodes=None) -> Topology:
    """Explicit topology (positions are unused and set to the origin)."""
    ids = list(nodes) if nodes is not None else []
    for a, b in edges:
        for r in (a, b):
            if r not in ids:
                ids.append(r)
    return Topology({r: (0.0, 0.0) for r in ids},
                    [Link(a, b, delay_ms, rate_bps) for a, b in edges])


def compute_routes(topology: Topology, producers: dict, *, adversarial: bool = False,
                   max_distance: int = 8, seed=0) -> dict:
    """Static routes: ``{router: {prefix: {neighbor: distance}}}``.

    ``producers`` maps a router id to the prefixes it originates. In normal
    mode the distance via neighbor ``v`` is ``1 + hops(v, producer)``. In
    adversarial mode every distance is drawn from ``1..max_distance``, which
    produces routing-table loops.
    """
    g = topology.graph()
    if not nx.is_connected(g):
        raise TopologyError("topology is not connected")
    nbrs = topology.neighbors()
    rng = random.Random(seed)
    routes = {r: {} for r in topology.positions}
    for producer in sorted(producers):
        if producer not in nbrs:
            raise TopologyError(f"producer {producer} is not in the topology")
        hops = nx.single_source_shortest_path_length(g, producer)
        for prefix in producers[producer]:
            for r in sorted(topology.positions):
                if r == producer:
                    continue
                if r not in hops:
                    raise TopologyError(f"{prefix} unreachable from {r}")
                table = routes[r].setdefault(prefix, {})
                for v in sorted(nbrs[r]):
                    if adversarial:
                        table[v] = rng.randint(1, max_distance)
                    else:
                        table[v] = 1 + hops[v]
    return routes


def install_routes(routers: dict, routes: dict) -> None:
    for r, table in routes.items():
        router = routers[r]
        for prefix, per_neighbor in table.items():
            for v, d in per_neighbor.items():
                router.add_route(prefix, v, d)
