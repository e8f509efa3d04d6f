"""Messages exchanged over links, for both forwarding planes.

Distances are hop counts; ``None`` stands for the empty (infinite) distance a
consumer puts in its requests, and compares greater than any integer.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

from .names import ContentName

HEADER_BYTES = 32

Distance = Optional[int]


def exceeds(d_in: Distance, d: int) -> bool:
    """True when ``d_in`` is strictly larger than the finite distance ``d``."""
    return d_in is None or d_in > d


class ReplyCode(str, enum.Enum):
    LOOP = "LOOP"
    NO_ROUTE = "NO_ROUTE"
    NO_CONTENT = "NO_CONTENT"


class NackReason(str, enum.Enum):
    DUPLICATE = "DUPLICATE"
    NO_ROUTE = "NO_ROUTE"
    NO_CONTENT = "NO_CONTENT"


# AIDs are ints on router-to-router links; towards a local consumer the
# consumer's id (a str) takes their place.
Aid = Union[int, str]


def _name_bytes(name: ContentName) -> int:
    return sum(len(c) + 2 for c in name.components)


@dataclass(frozen=True, slots=True)
class Interest:
    name: ContentName
    aid: Aid
    distance: Distance = None

    def __post_init__(self) -> None:
        if self.distance is not None and self.distance < 0:
            raise ValueError("distance must be non-negative")

    @property
    def size(self) -> int:
        return HEADER_BYTES + _name_bytes(self.name)


@dataclass(frozen=True, slots=True)
class DataPacket:
    name: ContentName
    aid: Aid
    security_payload: bytes = b""
    payload: bytes = b""

    @property
    def size(self) -> int:
        return HEADER_BYTES + _name_bytes(self.name) + len(self.security_payload) + len(self.payload)


@dataclass(frozen=True, slots=True)
class Reply:
    name: ContentName
    aid: Aid
    code: ReplyCode

    @property
    def size(self) -> int:
        return HEADER_BYTES + _name_bytes(self.name) + 1


@dataclass(frozen=True, slots=True)
class MulticastInterest:
    group: ContentName
    distance: Distance = None
    mc: int = 0

    @property
    def size(self) -> int:
        return HEADER_BYTES + _name_bytes(self.group)


@dataclass(frozen=True, slots=True)
class MulticastData:
    group: ContentName
    security_payload: bytes
    mc: int
    payload: bytes = b""

    @property
    def size(self) -> int:
        return HEADER_BYTES + _name_bytes(self.group) + len(self.security_payload) + len(self.payload)


@dataclass(frozen=True, slots=True)
class MulticastReply:
    group: ContentName
    code: ReplyCode
    mc: int

    @property
    def size(self) -> int:
        return HEADER_BYTES + _name_bytes(self.group) + 1


@dataclass(frozen=True, slots=True)
class NdnInterest:
    name: ContentName
    nonce: int

    @property
    def size(self) -> int:
        return HEADER_BYTES + _name_bytes(self.name) + 8


@dataclass(frozen=True, slots=True)
class NdnData:
    name: ContentName
    security_payload: bytes = b""
    payload: bytes = b""

    @property
    def size(self) -> int:
        return HEADER_BYTES + _name_bytes(self.name) + len(self.security_payload) + len(self.payload)


@dataclass(frozen=True, slots=True)
class Nack:
    name: ContentName
    nonce: int
    reason: NackReason

    @property
    def size(self) -> int:
        return HEADER_BYTES + _name_bytes(self.name) + 9


Message = Union[
    Interest, DataPacket, Reply,
    MulticastInterest, MulticastData, MulticastReply,
    NdnInterest, NdnData, Nack,
]


def to_record(msg: Message) -> dict:
    """Flatten a message into a JSON-friendly dict for the event trace.

    Payload bytes are reported by length only.
    """
    rec: dict = {"type": type(msg).__name__}
    for field in msg.__dataclass_fields__:
        value = getattr(msg, field)
        if isinstance(value, ContentName):
            value = str(value)
        elif isinstance(value, bytes):
            field = field + "_len"
            value = len(value)
        elif isinstance(value, enum.Enum):
            value = value.value
        rec[field] = value
    return rec
