"""Anonymous identifier intervals and the neighbor-to-neighbor AID mapping.

A router accepts AIDs from its own local interval. To pass an Interest on to
neighbor ``n`` it rewrites the AID into ``n``'s interval with

    f(n)[a] = start(n) + ((eps + a - start(own)) mod |LI|)

where ``eps`` is private to the router. The offset is reduced modulo the
interval length before the target start is added, so the image always lands
inside ``n``'s interval even when the intervals are far apart.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Optional


class AidError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class LocalInterval:
    start: int
    length: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise AidError("interval start must be non-negative")
        if self.length <= 0:
            raise AidError("interval length must be positive")

    def __contains__(self, aid: object) -> bool:
        return isinstance(aid, int) and self.start <= aid < self.start + self.length

    def __iter__(self):
        return iter(range(self.start, self.start + self.length))

    def __len__(self) -> int:
        return self.length


@dataclass
class ListTable:
    own: LocalInterval
    per_neighbor: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for nbr, iv in self.per_neighbor.items():
            if iv.length != self.own.length:
                raise AidError(f"interval of {nbr} has length {iv.length}, expected {self.own.length}")

    def set_neighbor(self, neighbor: Hashable, interval: LocalInterval) -> None:
        if interval.length != self.own.length:
            raise AidError("all local intervals must share one length")
        self.per_neighbor[neighbor] = interval

    def of(self, neighbor: Hashable) -> LocalInterval:
        try:
            return self.per_neighbor[neighbor]
        except KeyError:
            raise AidError(f"unknown neighbor {neighbor!r}") from None


class AidMapper:
    """Bijections between a router's own interval and each neighbor's."""

    __slots__ = ("_eps", "list")

    def __init__(self, epsilon: int, list_table: ListTable):
        self._eps = epsilon
        self.list = list_table

    def __repr__(self) -> str:
        # epsilon stays out of reprs and logs
        return f"AidMapper(own={self.list.own})"

    def map_forward(self, a: int, neighbor: Hashable) -> int:
        own = self.list.own
        if a not in own:
            raise AidError(f"AID {a} outside own interval")
        target = self.list.of(neighbor)
        return target.start + (self._eps + a - own.start) % own.length

    def map_inverse(self, b: int, neighbor: Hashable) -> int:
        own = self.list.own
        source = self.list.of(neighbor)
        if b not in source:
            raise AidError(f"AID {b} outside interval of {neighbor!r}")
        return own.start + (b - source.start - self._eps) % own.length


def map_forward(mapper: AidMapper, a: int, neighbor: Hashable) -> int:
    return mapper.map_forward(a, neighbor)


def map_inverse(mapper: AidMapper, b: int, neighbor: Hashable) -> int:
    return mapper.map_inverse(b, neighbor)


def allocate_aid(art: Mapping[int, object], own: LocalInterval) -> Optional[int]:
    """Smallest identifier of ``own`` that is not an ART key.

    Returns None when every identifier of the interval is taken.
    """
    for a in own:
        if a not in art:
            return a
    return None
