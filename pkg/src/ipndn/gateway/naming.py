"""Name grammars for Interest Requests and Interest Datagrams.

    request:            <prefix>/<dst>/ip/request/<src>/<seqno>
    datagram, basic:    <prefix>/<requester>/ip/datagram/<seqno>
    datagram, improved: <prefix>/<requester>/ip/datagram/<responder>/<seqno>

``requester`` is the gateway that sent the Interest Request (it holds the
pending packet); ``responder`` is the gateway answering it.
"""

from __future__ import annotations

from enum import Enum

from ..ndn import Name
from .routing import GatewayId

APP = b"ip"
REQUEST = b"request"
DATAGRAM = b"datagram"


class Mode(str, Enum):
    BASIC = "basic"
    IMPROVED = "improved"


class NameParseError(ValueError):
    pass


def _seqno_component(seqno: int) -> str:
    if seqno < 0:
        raise ValueError(f"negative seqno {seqno}")
    return str(seqno)


def _parse_seqno(comp: bytes) -> int:
    # canonical decimal only, so parse and make stay mutual inverses
    if not comp.isdigit() or (len(comp) > 1 and comp[:1] == b"0"):
        raise NameParseError(f"bad seqno component {comp!r}")
    return int(comp)


def _label(comp: bytes) -> str:
    try:
        return comp.decode("utf-8")
    except UnicodeDecodeError:
        raise NameParseError(f"gateway label is not UTF-8: {comp!r}") from None


def make_request_name(dst: GatewayId, src: GatewayId, seqno: int) -> Name:
    if dst == src:
        raise ValueError("request source and destination are the same gateway")
    return dst.name.append(APP, REQUEST, src.label, _seqno_component(seqno))


def parse_request_name(name: Name) -> tuple[GatewayId, GatewayId, int]:
    """Returns ``(dst, src, seqno)``; ``src`` shares ``dst``'s network prefix."""
    c = name.components
    if len(c) < 5 or c[-4] != APP or c[-3] != REQUEST:
        raise NameParseError(f"not a request name: {name}")
    dst = GatewayId(Name(c[:-5]), _label(c[-5]))
    src = dst.peer(_label(c[-2]))
    if src == dst:
        raise NameParseError(f"request names its own gateway as source: {name}")
    return dst, src, _parse_seqno(c[-1])


def make_datagram_name(mode: Mode, requester: GatewayId, responder: GatewayId, seqno: int) -> Name:
    base = requester.name.append(APP, DATAGRAM)
    if Mode(mode) is Mode.BASIC:
        return base.append(_seqno_component(seqno))
    return base.append(responder.label, _seqno_component(seqno))


def parse_datagram_name(mode: Mode, name: Name) -> tuple[GatewayId, str | None, int]:
    """Returns ``(requester, responder_label, seqno)``; the label is None in basic mode."""
    c = name.components
    if Mode(mode) is Mode.BASIC:
        if len(c) < 4 or c[-3] != APP or c[-2] != DATAGRAM:
            raise NameParseError(f"not a basic datagram name: {name}")
        return GatewayId(Name(c[:-4]), _label(c[-4])), None, _parse_seqno(c[-1])
    if len(c) < 5 or c[-4] != APP or c[-3] != DATAGRAM:
        raise NameParseError(f"not an improved datagram name: {name}")
    return GatewayId(Name(c[:-5]), _label(c[-5])), _label(c[-2]), _parse_seqno(c[-1])
