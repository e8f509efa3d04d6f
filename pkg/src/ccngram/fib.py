"""Forwarding information base shared by both planes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Optional

from .names import ContentName, NamePrefix


@dataclass
class FibEntry:
    prefix: NamePrefix
    per_neighbor_distance: dict = field(default_factory=dict)
    ranking: list = field(default_factory=list)

    def __post_init__(self) -> None:
        self.rerank()

    def rerank(self) -> None:
        # distance first, neighbor id breaks ties
        self.ranking = sorted(self.per_neighbor_distance,
                              key=lambda n: (self.per_neighbor_distance[n], n))

    def set_distance(self, neighbor: Hashable, distance: int) -> None:
        if distance < 0:
            raise ValueError("distance must be non-negative")
        self.per_neighbor_distance[neighbor] = distance
        self.rerank()

    def distance(self, neighbor: Hashable) -> int:
        return self.per_neighbor_distance[neighbor]

    def ranked(self):
        """(neighbor, distance) pairs, best first."""
        d = self.per_neighbor_distance
        return [(n, d[n]) for n in self.ranking]


class Fib:
    def __init__(self):
        self.entries: dict[NamePrefix, FibEntry] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, prefix: NamePrefix) -> bool:
        return prefix in self.entries

    def __getitem__(self, prefix: NamePrefix) -> FibEntry:
        return self.entries[prefix]

    def add_route(self, prefix: NamePrefix, neighbor: Hashable, distance: int) -> None:
        entry = self.entries.get(prefix)
        if entry is None:
            entry = self.entries[prefix] = FibEntry(prefix)
        entry.set_distance(neighbor, distance)

    def longest_match(self, name: ContentName) -> Optional[FibEntry]:
        entries = self.entries
        for prefix in name.prefixes():
            entry = entries.get(prefix)
            if entry is not None:
                return entry
        return None
