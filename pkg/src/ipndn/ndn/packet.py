"""Interest/Data packets and their TLV wire codec.

Layout (all integers big-endian, see docs/wire-format.md)::

    u8  type         1 = Interest, 2 = Data
    u32 body length
    body:
      u16 component count
      (u16 length, bytes) per component
      Interest: u32 nonce, u32 lifetime_ms
      Data:     u32 content length, content bytes, u32 freshness_ms
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Union

from .name import Name

MAX_DATA_CONTENT = 8000
DEFAULT_INTEREST_LIFETIME_MS = 4000

TYPE_INTEREST = 1
TYPE_DATA = 2

_U16 = struct.Struct(">H")
_U32 = struct.Struct(">I")
_HEADER = struct.Struct(">BI")


class DecodeError(ValueError):
    """Raised when a buffer is not a valid packet encoding."""

    def __init__(self, offset: int, reason: str):
        super().__init__(f"offset {offset}: {reason}")
        self.offset = offset
        self.reason = reason


class PacketTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Interest:
    name: Name
    nonce: int
    # 0 means "not specified"; forwarders apply their default lifetime.
    lifetime_ms: int = DEFAULT_INTEREST_LIFETIME_MS

    def __post_init__(self) -> None:
        if len(self.name) == 0:
            raise ValueError("Interest name must have at least one component")
        if not 0 <= self.nonce < 2**32:
            raise ValueError(f"nonce out of range: {self.nonce}")
        if not 0 <= self.lifetime_ms < 2**32:
            raise ValueError(f"lifetime out of range: {self.lifetime_ms}")


@dataclass(frozen=True)
class Data:
    name: Name
    content: bytes = b""
    freshness_ms: int = 0

    def __post_init__(self) -> None:
        if len(self.name) == 0:
            raise ValueError("Data name must have at least one component")
        if not 0 <= self.freshness_ms < 2**32:
            raise ValueError(f"freshness out of range: {self.freshness_ms}")


Packet = Union[Interest, Data]


def _encode_name(name: Name) -> bytes:
    parts = [_U16.pack(len(name.components))]
    for c in name.components:
        if len(c) > 0xFFFF:
            raise PacketTooLarge(f"name component of {len(c)} octets")
        parts.append(_U16.pack(len(c)))
        parts.append(c)
    return b"".join(parts)


def encode_packet(packet: Packet, max_content: int = MAX_DATA_CONTENT) -> bytes:
    if isinstance(packet, Interest):
        body = _encode_name(packet.name) + struct.pack(">II", packet.nonce, packet.lifetime_ms)
        tag = TYPE_INTEREST
    elif isinstance(packet, Data):
        if len(packet.content) > max_content:
            raise PacketTooLarge(
                f"Data content of {len(packet.content)} octets exceeds limit {max_content}"
            )
        body = (
            _encode_name(packet.name)
            + _U32.pack(len(packet.content))
            + packet.content
            + _U32.pack(packet.freshness_ms)
        )
        tag = TYPE_DATA
    else:
        raise TypeError(f"not a packet: {packet!r}")
    return _HEADER.pack(tag, len(body)) + body


class _Reader:
    def __init__(self, buf: bytes, end: int):
        self.buf = buf
        self.pos = 0
        self.end = end

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > self.end:
            raise DecodeError(self.pos, f"truncated {what}: need {n} octets, have {self.end - self.pos}")
        chunk = self.buf[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u16(self, what: str) -> int:
        return _U16.unpack(self.take(2, what))[0]

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(4, what))[0]


def _decode_name(r: _Reader) -> Name:
    start = r.pos
    count = r.u16("component count")
    if count == 0:
        raise DecodeError(start, "name has no components")
    comps = []
    for _ in range(count):
        at = r.pos
        length = r.u16("component length")
        if length == 0:
            raise DecodeError(at, "empty name component")
        comp = r.take(length, "name component")
        if b"/" in comp:
            raise DecodeError(at, "name component contains '/'")
        comps.append(comp)
    return Name(tuple(comps))


def decode_packet(buf: bytes, max_content: int = MAX_DATA_CONTENT) -> Packet:
    buf = bytes(buf)
    if len(buf) < _HEADER.size:
        raise DecodeError(len(buf), "truncated packet header")
    tag, body_len = _HEADER.unpack_from(buf)
    if tag not in (TYPE_INTEREST, TYPE_DATA):
        raise DecodeError(0, f"unknown type tag {tag}")
    end = _HEADER.size + body_len
    if end > len(buf):
        raise DecodeError(1, f"body length {body_len} overruns buffer of {len(buf)} octets")
    if end < len(buf):
        raise DecodeError(end, f"{len(buf) - end} trailing octets after packet")

    r = _Reader(buf, end)
    r.pos = _HEADER.size
    name = _decode_name(r)
    if tag == TYPE_INTEREST:
        nonce = r.u32("nonce")
        lifetime = r.u32("lifetime")
        packet: Packet = Interest(name, nonce, lifetime)
    else:
        at = r.pos
        clen = r.u32("content length")
        if clen > max_content:
            raise DecodeError(at, f"content length {clen} exceeds limit {max_content}")
        content = r.take(clen, "content")
        freshness = r.u32("freshness")
        packet = Data(name, content, freshness)
    if r.pos != end:
        raise DecodeError(r.pos, f"{end - r.pos} unconsumed octets in body")
    return packet


def wire_size(packet: Packet) -> int:
    """Encoded length of ``packet`` without building the buffer."""
    n = 5 + 2 + sum(2 + len(c) for c in packet.name.components)
    if isinstance(packet, Interest):
        return n + 8
    return n + 4 + len(packet.content) + 4
