"""Request generation: Zipf popularity over a catalog partitioned across
producers, with an optional rotating hot set for temporal locality."""
from __future__ import annotations

import bisect
import itertools
import random
from dataclasses import dataclass
from typing import Optional

from .names import ContentName, NamePrefix


class ZipfSampler:
    """Ranks 1..n with P(k) proportional to k**-alpha (alpha >= 0)."""

    def __init__(self, n: int, alpha: float):
        if n < 1:
            raise ValueError("n must be positive")
        if alpha < 0:
            raise ValueError("alpha must be non-negative")
        self.n = n
        self.alpha = alpha
        self._cdf = list(itertools.accumulate(k ** -alpha for k in range(1, n + 1)))
        self.total = self._cdf[-1]

    def pmf(self, k: int) -> float:
        return k ** -self.alpha / self.total

    def cdf(self, k: int) -> float:
        return self._cdf[k - 1] / self.total

    def draw(self, rng: random.Random) -> int:
        return bisect.bisect_left(self._cdf, rng.random() * self.total) + 1


class ObjectRange:
    """Membership test for the objects one producer prefix holds."""

    __slots__ = ("catalog", "producer_index", "slot")

    def __init__(self, catalog: "Catalog", producer_index: int, slot: int):
        self.catalog = catalog
        self.producer_index = producer_index
        self.slot = slot

    def __contains__(self, name) -> bool:
        obj = self.catalog.object_of(name)
        return obj is not None and self.catalog.owner(obj) == (self.producer_index, self.slot)


class Catalog:
    """Objects ``0..size-1`` spread round-robin over producers and, within a
    producer, over its prefixes. Names look like ``/p3/s0/o1234``."""

    def __init__(self, size: int, n_producers: int, prefixes_per_producer: int = 1):
        if size < 1 or n_producers < 1 or prefixes_per_producer < 1:
            raise ValueError("catalog size, producers and prefixes must be positive")
        self.size = size
        self.n_producers = n_producers
        self.prefixes_per_producer = prefixes_per_producer
        self._names: dict[int, ContentName] = {}
        self._ids: dict[ContentName, int] = {}

    def owner(self, obj: int) -> tuple:
        return obj % self.n_producers, (obj // self.n_producers) % self.prefixes_per_producer

    def prefix(self, producer_index: int, slot: int) -> NamePrefix:
        return NamePrefix((f"p{producer_index}".encode(), f"s{slot}".encode()))

    def prefixes_of(self, producer_index: int) -> list:
        return [self.prefix(producer_index, s) for s in range(self.prefixes_per_producer)]

    def name(self, obj: int) -> ContentName:
        name = self._names.get(obj)
        if name is None:
            p, s = self.owner(obj)
            name = ContentName((f"p{p}".encode(), f"s{s}".encode(), f"o{obj}".encode()))
            self._names[obj] = name
            self._ids[name] = obj
        return name

    def object_of(self, name: ContentName) -> Optional[int]:
        obj = self._ids.get(name)
        if obj is not None:
            return obj
        comps = name.components
        if len(comps) != 3 or not comps[2].startswith(b"o"):
            return None
        try:
            obj = int(comps[2][1:])
        except ValueError:
            return None
        if not 0 <= obj < self.size or self.name(obj) != name:
            return None
        return obj

    def objects(self, producer_index: int, slot: int) -> ObjectRange:
        return ObjectRange(self, producer_index, slot)


@dataclass
class TemporalLocality:
    """Rotating hot set.

    Time is cut into epochs of ``period_s / factor`` seconds. Each epoch picks
    ``hot_set_size`` objects network-wide; a request goes to the hot set with
    probability ``factor / (1 + factor)`` (Zipf over the hot set), otherwise
    to the base Zipf ranking. Factor 0 disables locality.
    """

    factor: float
    period_s: float = 40.0
    hot_set_size: int = 20

    @property
    def hot_probability(self) -> float:
        return self.factor / (1.0 + self.factor)

    def epoch(self, now_ms: float) -> int:
        if self.factor <= 0:
            return 0
        return int(now_ms / (1000.0 * self.period_s / self.factor))


class Workload:
    """Shared popularity model; each consumer draws from its own stream."""

    def __init__(self, catalog: Catalog, alpha: float, seed, *,
                 locality: Optional[TemporalLocality] = None,
                 duplicate_prob: float = 0.0):
        self.catalog = catalog
        self.sampler = ZipfSampler(catalog.size, alpha)
        self.seed = seed
        self.locality = locality
        self.duplicate_prob = duplicate_prob
        # popularity rank -> object id, fixed for the run
        perm = list(range(catalog.size))
        random.Random(f"{seed}:ranking").shuffle(perm)
        self._rank_to_obj = perm
        self._hot: dict[int, list] = {}
        self._hot_sampler = (ZipfSampler(min(locality.hot_set_size, catalog.size), alpha)
                             if locality and locality.factor > 0 else None)

    def hot_set(self, epoch: int) -> list:
        hot = self._hot.get(epoch)
        if hot is None:
            rng = random.Random(f"{self.seed}:hot:{epoch}")
            hot = rng.sample(range(self.catalog.size), self._hot_sampler.n)
            self._hot = {epoch: hot}
        return hot

    def stream(self, consumer: str) -> "ConsumerStream":
        return ConsumerStream(self, random.Random(f"{self.seed}:workload:{consumer}"))


class ConsumerStream:
    def __init__(self, workload: Workload, rng: random.Random):
        self.w = workload
        self.rng = rng
        self.last: Optional[ContentName] = None

    def interarrival_ms(self, rate_per_s: float) -> float:
        return self.rng.expovariate(rate_per_s) * 1000.0

    def draw_request(self, now_ms: float) -> ContentName:
        w = self.w
        rng = self.rng
        if self.last is not None and w.duplicate_prob > 0 and rng.random() < w.duplicate_prob:
            return self.last
        loc = w.locality
        if w._hot_sampler is not None and rng.random() < loc.hot_probability:
            hot = w.hot_set(loc.epoch(now_ms))
            obj = hot[w._hot_sampler.draw(rng) - 1]
        else:
            obj = w._rank_to_obj[w.sampler.draw(rng) - 1]
        name = w.catalog.name(obj)
        self.last = name
        return name


def draw_request(stream: ConsumerStream, now_ms: float) -> ContentName:
    return stream.draw_request(now_ms)
