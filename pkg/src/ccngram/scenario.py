"""Scenario files: YAML documents mapped onto dataclass configs.

Every error raised while loading carries the line of the offending key so the
CLI can point at it.
"""
from __future__ import annotations

import dataclasses
import typing
from dataclasses import dataclass, field
from typing import Optional, Union

import yaml

from .store import CachingPolicy

PLANES = ("gram", "ndn")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "<scenario>"):
        self.message = message
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass
class TopologyConfig:
    routers: int = 50
    area: float = 100.0
    radius: float = 18.0
    delay_ms: float = 15.0
    rate_bps: float = 1e9
    seed: Optional[int] = None
    edges: Optional[list] = None


@dataclass
class RoutingConfig:
    mode: str = "normal"
    max_distance: int = 8


@dataclass
class AidConfig:
    interval_length: int = 65536
    epsilon_seed: Optional[int] = None
    interval_start: dict = field(default_factory=dict)


@dataclass
class WorkloadConfig:
    catalog_size: int = 100_000
    zipf_alpha: float = 0.7
    rate: float = 50.0
    # a count drawn at random, the string "all", or explicit router ids
    consumer_routers: Union[int, str, list] = 10
    producer_routers: Union[int, str, list] = 5
    prefixes_per_producer: int = 1
    temporal_locality: float = 0.0
    locality_period_s: float = 40.0
    hot_set_size: int = 20
    duplicate_prob: float = 0.01
    payload_size: int = 1024


@dataclass
class CacheConfig:
    mode: CachingPolicy = CachingPolicy.ON_PATH
    capacity: Optional[int] = None
    capacity_fraction: float = 0.001

    def objects(self, catalog_size: int) -> int:
        if self.mode is CachingPolicy.NONE:
            return 0
        if self.capacity is not None:
            return self.capacity
        return int(round(self.capacity_fraction * catalog_size))


@dataclass
class ConsumerConfig:
    retransmit: bool = True
    max_tries: int = 3
    initial_rtt_ms: float = 500.0
    min_timeout_ms: float = 1000.0


@dataclass
class GroupConfig:
    name: str = "/mcast/g0"
    source: str = ""
    receivers: dict = field(default_factory=dict)
    mode: str = "pull"
    objects: int = 100
    interval_ms: float = 10.0
    start_ms: float = 0.0
    data_start_ms: Optional[float] = None


@dataclass
class Scenario:
    name: str = "scenario"
    plane: list = field(default_factory=lambda: ["gram", "ndn"])
    seed: int = 1
    warmup_s: float = 10.0
    measure_s: float = 30.0
    sample_interval_ms: float = 100.0
    pit_lifetime_ms: float = 2000.0
    art_idle_timeout_ms: Optional[float] = None
    max_events: int = 50_000_000
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    routing: RoutingConfig = field(default_factory=RoutingConfig)
    aid: AidConfig = field(default_factory=AidConfig)
    workload: WorkloadConfig = field(default_factory=WorkloadConfig)
    cache: CacheConfig = field(default_factory=CacheConfig)
    consumer: ConsumerConfig = field(default_factory=ConsumerConfig)
    multicast: list = field(default_factory=list)
    sweep: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict, repr=False, compare=False)
    defaulted: list = field(default_factory=list, repr=False, compare=False)

    @property
    def duration_ms(self) -> float:
        return 1000.0 * (self.warmup_s + self.measure_s)

    def line_of(self, *path) -> Optional[int]:
        return self.lines.get(tuple(path))


# -- YAML -> dataclass ----------------------------------------------------

_NESTED = {
    "topology": TopologyConfig, "routing": RoutingConfig, "aid": AidConfig,
    "workload": WorkloadConfig, "cache": CacheConfig, "consumer": ConsumerConfig,
}


def _scalar(node, source):
    return yaml.safe_load(yaml.serialize(node)) if node is not None else None


def _coerce(value, hint, path, line, source):
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    if origin is Union:
        if value is None and type(None) in args:
            return None
        errors = []
        for arg in args:
            if arg is type(None):
                continue
            try:
                return _coerce(value, arg, path, line, source)
            except ScenarioError as e:
                errors.append(e.message)
        raise ScenarioError(f"{'.'.join(path)}: " + "; ".join(errors), line, source)
    if hint is bool:
        if not isinstance(value, bool):
            raise ScenarioError(f"{'.'.join(path)} must be true/false, got {value!r}", line, source)
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ScenarioError(f"{'.'.join(path)} must be an integer, got {value!r}", line, source)
        return int(value)
    if hint is float:
        if isinstance(value, str):
            # YAML 1.1 reads 1.0e9 (no exponent sign) as a string
            try:
                value = float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"{'.'.join(path)} must be a number, got {value!r}", line, source)
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ScenarioError(f"{'.'.join(path)} must be a string, got {value!r}", line, source)
        return value
    if hint is list or origin is list:
        if not isinstance(value, list):
            raise ScenarioError(f"{'.'.join(path)} must be a list", line, source)
        return value
    if hint is dict or origin is dict:
        if not isinstance(value, dict):
            raise ScenarioError(f"{'.'.join(path)} must be a mapping", line, source)
        return value
    if isinstance(hint, type) and issubclass(hint, CachingPolicy):
        try:
            return CachingPolicy(value)
        except ValueError:
            choices = ", ".join(p.value for p in CachingPolicy)
            raise ScenarioError(f"{'.'.join(path)} must be one of {choices}", line, source) from None
    return value


def _build(cls, node, path, lines, source):
    if not isinstance(node, yaml.MappingNode):
        raise ScenarioError(f"{'.'.join(path) or 'scenario'} must be a mapping",
                            node.start_mark.line + 1, source)
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)} - {"lines", "defaulted"}
    kwargs = {}
    for key_node, value_node in node.value:
        key = key_node.value
        line = key_node.start_mark.line + 1
        if key not in names:
            raise ScenarioError(f"unknown key {'.'.join(path + (key,))!r}", line, source)
        if key in kwargs:
            raise ScenarioError(f"duplicate key {'.'.join(path + (key,))!r}", line, source)
        lines[path + (key,)] = line
        if not path and key in _NESTED:
            kwargs[key] = _build(_NESTED[key], value_node, (key,), lines, source)
        elif not path and key == "multicast":
            if not isinstance(value_node, yaml.SequenceNode):
                raise ScenarioError("multicast must be a list of groups", line, source)
            kwargs[key] = [_build(GroupConfig, item, ("multicast", str(i)), lines, source)
                           for i, item in enumerate(value_node.value)]
        else:
            value = _scalar(value_node, source)
            if not path and key == "plane" and isinstance(value, str):
                value = [value]
            kwargs[key] = _coerce(value, hints[key], path + (key,), line, source)
    return cls(**kwargs)


def loads(text: str, source: str = "<scenario>") -> Scenario:
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ScenarioError(f"YAML syntax error: {getattr(e, 'problem', e)}",
                            mark.line + 1 if mark else None, source) from None
    if root is None:
        scenario = Scenario()
    else:
        lines: dict = {}
        scenario = _build(Scenario, root, (), lines, source)
        scenario.lines = lines
    if ("seed",) not in scenario.lines:
        scenario.defaulted.append("seed")
    validate(scenario, source)
    return scenario


def load(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), str(path))


def _role_count(value, n_routers):
    if value == "all":
        return n_routers
    if isinstance(value, int):
        return value
    if isinstance(value, list):
        return len(value)
    return None


def validate(s: Scenario, source: str = "<scenario>") -> None:
    def fail(msg, *path):
        raise ScenarioError(msg, s.line_of(*path), source)

    for p in s.plane:
        if p not in PLANES:
            fail(f"plane must be one of {PLANES}, got {p!r}", "plane")
    if s.warmup_s < 0:
        fail("warmup_s must be non-negative", "warmup_s")
    if s.measure_s <= 0:
        fail("measure_s must be positive", "measure_s")
    if s.sample_interval_ms <= 0:
        fail("sample_interval_ms must be positive", "sample_interval_ms")
    if s.pit_lifetime_ms <= 0:
        fail("pit_lifetime_ms must be positive", "pit_lifetime_ms")
    t = s.topology
    n = t.routers
    if t.edges is None:
        if n < 2:
            fail("topology.routers must be at least 2", "topology", "routers")
        if t.area <= 0 or t.radius <= 0:
            fail("topology.area and topology.radius must be positive", "topology", "radius")
    else:
        ids = set()
        for e in t.edges:
            if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)):
                fail("topology.edges entries must be [router, router] pairs", "topology", "edges")
            ids.update(e)
        n = len(ids)
    if t.delay_ms < 0:
        fail("topology.delay_ms must be non-negative", "topology", "delay_ms")
    if t.rate_bps <= 0:
        fail("topology.rate_bps must be positive", "topology", "rate_bps")
    if s.routing.mode not in ("normal", "adversarial"):
        fail("routing.mode must be 'normal' or 'adversarial'", "routing", "mode")
    if s.routing.max_distance < 1:
        fail("routing.max_distance must be at least 1", "routing", "max_distance")
    w = s.workload
    if w.rate <= 0:
        fail("workload.rate must be positive", "workload", "rate")
    if w.zipf_alpha <= 0:
        fail("workload.zipf_alpha must be positive", "workload", "zipf_alpha")
    if w.catalog_size < 1:
        fail("workload.catalog_size must be positive", "workload", "catalog_size")
    if not 0 <= w.duplicate_prob < 1:
        fail("workload.duplicate_prob must be in [0, 1)", "workload", "duplicate_prob")
    if w.temporal_locality < 0:
        fail("workload.temporal_locality must be non-negative", "workload", "temporal_locality")
    for role in ("consumer_routers", "producer_routers"):
        value = getattr(w, role)
        count = _role_count(value, n)
        if count is None or count < 0 or count > n:
            fail(f"workload.{role} must be 'all', a count up to {n}, or a list of router ids",
                 "workload", role)
    n_prod = _role_count(w.producer_routers, n)
    if n_prod < 1:
        fail("at least one producer router is required", "workload", "producer_routers")
    if (w.consumer_routers != "all" and w.producer_routers != "all"
            and isinstance(w.consumer_routers, int) and isinstance(w.producer_routers, int)
            and w.consumer_routers + w.producer_routers > n):
        fail("consumer and producer routers must fit in the topology", "workload", "consumer_routers")
    if s.aid.interval_length < n + 1:
        # each origin router needs an identifier at every relay, plus the relay's own
        fail(f"aid.interval_length must be at least {n + 1} for {n} routers",
             "aid", "interval_length")
    if s.cache.capacity is not None and s.cache.capacity < 0:
        fail("cache.capacity must be non-negative", "cache", "capacity")
    if not 0 <= s.cache.capacity_fraction <= 1:
        fail("cache.capacity_fraction must be in [0, 1]", "cache", "capacity_fraction")
    for key, values in s.sweep.items():
        if not isinstance(values, list) or not values:
            fail(f"sweep.{key} must be a non-empty list", "sweep")
        target = ALIASES.get(key, key).split(".")
        if not (target == ["plane"] or (len(target) == 2 and target[0] in _NESTED
                                         and target[1] in typing.get_type_hints(_NESTED[target[0]]))
                or (len(target) == 1 and target[0] in ("seed", "warmup_s", "measure_s", "pit_lifetime_ms"))):
            fail(f"cannot sweep over {key!r}", "sweep")
    for i, g in enumerate(s.multicast):
        key = ("multicast", str(i))
        if not g.name.startswith("/mcast/"):
            fail("multicast group names live under /mcast/", *key, "name")
        if g.mode not in ("pull", "push"):
            fail("multicast mode must be 'pull' or 'push'", *key, "mode")
        if not g.source:
            fail("multicast group needs a source router", *key, "source")
        if not g.receivers:
            fail("multicast group needs receivers", *key, "receivers")


# -- sweep overrides ------------------------------------------------------

ALIASES = {
    "rate": "workload.rate",
    "alpha": "workload.zipf_alpha",
    "locality": "workload.temporal_locality",
    "catalog": "workload.catalog_size",
    "caching": "cache.mode",
    "cache": "cache.capacity_fraction",
    "cache_objects": "cache.capacity",
    "delay_ms": "topology.delay_ms",
    "routers": "topology.routers",
}


def override(s: Scenario, key: str, raw) -> Scenario:
    """Copy of ``s`` with the dotted ``key`` (or an alias) set to ``raw``."""
    path = ALIASES.get(key, key).split(".")
    if path == ["plane"]:
        out = dataclasses.replace(s, plane=[raw] if isinstance(raw, str) else list(raw))
        validate(out)
        return out
    if len(path) == 1:
        target_cls, parent = Scenario, None
    elif len(path) == 2 and path[0] in _NESTED:
        target_cls, parent = _NESTED[path[0]], getattr(s, path[0])
    else:
        raise ScenarioError(f"cannot sweep over {key!r}")
    hints = typing.get_type_hints(target_cls)
    if path[-1] not in hints or path[-1] in ("lines", "defaulted"):
        raise ScenarioError(f"unknown sweep key {key!r}")
    value = raw
    if isinstance(raw, str):
        value = yaml.safe_load(raw)
    value = _coerce(value, hints[path[-1]], tuple(path), None, "<sweep>")
    if parent is None:
        out = dataclasses.replace(s, **{path[0]: value})
    else:
        out = dataclasses.replace(s, **{path[0]: dataclasses.replace(parent, **{path[1]: value})})
    validate(out)
    return out
