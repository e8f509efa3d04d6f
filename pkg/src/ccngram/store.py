"""LRU content store and the caching-policy switch."""
from __future__ import annotations

import enum
from collections import OrderedDict
from typing import Hashable, Optional


class CachingPolicy(str, enum.Enum):
    NONE = "none"
    ON_PATH = "on_path"   # every router on the return path
    EDGE = "edge"         # only the router serving the requesting consumer

    def caches_at(self, is_origin: bool) -> bool:
        if self is CachingPolicy.ON_PATH:
            return True
        if self is CachingPolicy.EDGE:
            return is_origin
        return False


class ContentStore:
    """Fixed-capacity object cache with least-recently-used eviction."""

    def __init__(self, capacity: int):
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = capacity
        self._entries: OrderedDict = OrderedDict()
        self.evictions = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: Hashable) -> bool:
        return name in self._entries

    def lookup(self, name: Hashable) -> Optional[bytes]:
        try:
            payload = self._entries[name]
        except KeyError:
            return None
        self._entries.move_to_end(name)
        return payload

    def insert(self, name: Hashable, payload: bytes) -> Optional[Hashable]:
        """Store ``payload``; returns the evicted name, if any."""
        if self.capacity == 0:
            return None
        if name in self._entries:
            self._entries.move_to_end(name)
            self._entries[name] = payload
            return None
        victim = None
        if len(self._entries) >= self.capacity:
            victim, _ = self._entries.popitem(last=False)
            self.evictions += 1
        self._entries[name] = payload
        return victim

    def names(self) -> list:
        """Names from least to most recently used."""
        return list(self._entries)


def cs_lookup(store: ContentStore, name) -> Optional[bytes]:
    return store.lookup(name)
