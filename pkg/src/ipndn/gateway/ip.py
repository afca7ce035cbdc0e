"""Minimal IPv4 datagrams and macro-packet (de)serialization.

Only the 20-octet option-less header is supported. The header checksum is
written as zero and never verified.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from ipaddress import IPv4Address

HEADER_LEN = 20
PROTO_UDP = 17

# ver/ihl, tos, total length, id, flags/frag, ttl, protocol, checksum, src, dst
_HDR = struct.Struct(">BBHHHBBH4s4s")


class MalformedDatagram(ValueError):
    def __init__(self, offset: int, reason: str):
        super().__init__(f"offset {offset}: {reason}")
        self.offset = offset


@dataclass(frozen=True)
class IpDatagram:
    src: IPv4Address
    dst: IPv4Address
    payload: bytes = b""
    protocol: int = PROTO_UDP
    ttl: int = 64
    version: int = 4
    header_length: int = HEADER_LEN

    def __post_init__(self) -> None:
        object.__setattr__(self, "src", IPv4Address(self.src))
        object.__setattr__(self, "dst", IPv4Address(self.dst))
        if self.version != 4 or self.header_length != HEADER_LEN:
            raise ValueError("only option-less IPv4 headers are supported")
        if self.total_length > 0xFFFF:
            raise ValueError(f"datagram too long: {self.total_length}")

    @property
    def total_length(self) -> int:
        return self.header_length + len(self.payload)

    def to_bytes(self) -> bytes:
        header = _HDR.pack(
            (self.version << 4) | (self.header_length // 4),
            0,
            self.total_length,
            0,
            0,
            self.ttl,
            self.protocol,
            0,
            self.src.packed,
            self.dst.packed,
        )
        return header + self.payload

    @classmethod
    def from_bytes(cls, buf: bytes) -> IpDatagram:
        if len(buf) < HEADER_LEN:
            raise MalformedDatagram(0, f"{len(buf)} octets is shorter than an IPv4 header")
        ver_ihl, _tos, total, _id, _frag, ttl, proto, _csum, src, dst = _HDR.unpack_from(buf)
        if ver_ihl != 0x45:
            raise MalformedDatagram(0, f"unsupported version/IHL byte {ver_ihl:#04x}")
        if total != len(buf):
            raise MalformedDatagram(2, f"total length {total} does not match buffer of {len(buf)}")
        return cls(IPv4Address(src), IPv4Address(dst), bytes(buf[HEADER_LEN:]), proto, ttl)


def join_macro(datagrams) -> bytes:
    return b"".join(d.to_bytes() for d in datagrams)


def split_macro(content: bytes) -> tuple[list[IpDatagram], int | None]:
    """Split concatenated datagrams using each header's total-length field.

    Returns the datagrams recovered in order and, if the walk hit a malformed
    slice, the offset where it stopped (``None`` when the whole buffer parsed).
    """
    out = []
    offset = 0
    end = len(content)
    while offset < end:
        if end - offset < HEADER_LEN:
            return out, offset
        total = (content[offset + 2] << 8) | content[offset + 3]
        if total < HEADER_LEN or offset + total > end:
            return out, offset
        try:
            out.append(IpDatagram.from_bytes(content[offset : offset + total]))
        except (MalformedDatagram, ValueError):
            return out, offset
        offset += total
    return out, None
