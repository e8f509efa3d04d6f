"""Hierarchical content names and longest-prefix matching."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

MAX_NAME_BYTES = 4096


class InvalidName(ValueError):
    """Raised for names that cannot be parsed or exceed the length limit."""


def _split(text: str) -> tuple[bytes, ...]:
    if not text.startswith("/"):
        raise InvalidName(f"name must start with '/': {text!r}")
    parts = text.strip("/").split("/")
    if parts == [""]:
        return ()
    if any(p == "" for p in parts):
        raise InvalidName(f"empty name segment in {text!r}")
    return tuple(p.encode() for p in parts)


def _render(components: tuple[bytes, ...]) -> str:
    return "/" + "/".join(c.decode(errors="backslashreplace") for c in components)


@dataclass(frozen=True, slots=True)
class ContentName:
    components: tuple[bytes, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise InvalidName("a content name needs at least one component")
        if any(not c for c in self.components):
            raise InvalidName("name components must be non-empty")
        if sum(len(c) for c in self.components) > MAX_NAME_BYTES:
            raise InvalidName("name exceeds the encoded length limit")

    @classmethod
    def parse(cls, text: str) -> "ContentName":
        return cls(_split(text))

    def prefixes(self) -> Iterable["NamePrefix"]:
        """Every prefix of this name, longest first."""
        for k in range(len(self.components), 0, -1):
            yield NamePrefix(self.components[:k])

    def __str__(self) -> str:
        return _render(self.components)

    def __repr__(self) -> str:
        return f"ContentName({_render(self.components)!r})"


@dataclass(frozen=True, slots=True)
class NamePrefix:
    components: tuple[bytes, ...]

    @classmethod
    def parse(cls, text: str) -> "NamePrefix":
        return cls(_split(text))

    def matches(self, name: ContentName) -> bool:
        k = len(self.components)
        return name.components[:k] == self.components

    def __len__(self) -> int:
        return len(self.components)

    def __str__(self) -> str:
        return _render(self.components)

    def __repr__(self) -> str:
        return f"NamePrefix({_render(self.components)!r})"


def prefix_match(name: ContentName, prefixes) -> Optional[NamePrefix]:
    """Longest prefix in ``prefixes`` that matches ``name``, or None.

    ``prefixes`` only needs to support ``in``; dicts and sets both work.
    """
    for candidate in name.prefixes():
        if candidate in prefixes:
            return candidate
    return None
