"""IP-over-NDN gateway state machine (basic and improved protocols).

Handlers never perform I/O. Capture/interest/tick handlers return the NDN
packets the gateway originates (to be handed to its local forwarder through
the application face); ``on_data_arrival`` returns datagrams to inject into
the attached subnet. Times are integer microseconds.
"""

from __future__ import annotations

import logging
import random
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum

from ..ndn import MAX_DATA_CONTENT, Data, Interest, Name, Packet
from .ip import IpDatagram, MalformedDatagram, split_macro
from .naming import (
    APP,
    DATAGRAM,
    REQUEST,
    Mode,
    NameParseError,
    make_datagram_name,
    make_request_name,
    parse_datagram_name,
    parse_request_name,
)
from .routing import GatewayId, RoutingTable

log = logging.getLogger(__name__)

QUEUE_BYTE_LIMIT = 1 << 20
PENDING_TTL_MS = 5000
DATA_FRESHNESS_MS = 1000


@dataclass
class GatewayConfig:
    label: str
    prefix: Name = field(default_factory=lambda: Name.of("mynet"))
    mode: Mode = Mode.BASIC
    # (subnet, gateway label) pairs, including the gateway's own subnets
    routes: list = field(default_factory=list)
    max_data_content: int = MAX_DATA_CONTENT
    queue_byte_limit: int = QUEUE_BYTE_LIMIT
    pending_ttl_ms: int = PENDING_TTL_MS
    interest_lifetime_ms: int = 4000
    data_freshness_ms: int = DATA_FRESHNESS_MS
    seqno_origin: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.prefix, str):
            self.prefix = Name.parse(self.prefix)
        self.mode = Mode(self.mode)


class MacroState(str, Enum):
    OPEN = "open"  # newest in its queue, Request sent, still accepts appends
    REQUESTED = "requested"  # superseded by a newer macro-packet, awaiting its Interest Datagram
    IN_FLIGHT = "in-flight"  # authorized by an Interest Datagram, being sent as Data


@dataclass
class MacroPacket:
    queue_id: GatewayId
    seqno: int
    created_at: int
    datagrams: list = field(default_factory=list)
    size: int = 0
    state: MacroState = MacroState.OPEN

    def append(self, dgram: IpDatagram) -> None:
        self.datagrams.append(dgram)
        self.size += dgram.total_length

    def serialize(self) -> bytes:
        return b"".join(d.to_bytes() for d in self.datagrams)


@dataclass
class _Pending:
    datagram: IpDatagram
    stored_at: int


class _MacroQueue:
    def __init__(self, queue_id: GatewayId, origin: int):
        self.queue_id = queue_id
        self.next_seqno = origin
        self.packets: OrderedDict[int, MacroPacket] = OrderedDict()
        self.stored_bytes = 0

    def last(self) -> MacroPacket | None:
        if not self.packets:
            return None
        return self.packets[next(reversed(self.packets))]


@dataclass
class GatewayCounters:
    captured: int = 0
    tunneled: int = 0
    unroutable: int = 0
    local: int = 0
    oversized: int = 0
    overflow: int = 0
    expired_datagrams: int = 0
    expired_macros: int = 0
    requests_sent: int = 0
    datagram_interests_sent: int = 0
    data_sent: int = 0
    datagrams_sent: int = 0
    parse_errors: int = 0
    misses: int = 0
    corruption: int = 0
    injected: int = 0

    @property
    def ndn_originated(self) -> int:
        return self.requests_sent + self.datagram_interests_sent + self.data_sent


class Gateway:
    def __init__(self, config: GatewayConfig, rng: random.Random | None = None):
        self.config = config
        self.mode = config.mode
        self.id = GatewayId(config.prefix, config.label)
        self.rng = rng if rng is not None else random.Random(0)
        self.table = RoutingTable((subnet, self.id.peer(label)) for subnet, label in config.routes)
        self.counters = GatewayCounters()
        # basic mode
        self._pending: OrderedDict[int, _Pending] = OrderedDict()
        self._pending_bytes = 0
        self._next_seqno = config.seqno_origin
        # improved mode
        self._queues: dict[str, _MacroQueue] = {}

    # -- introspection -------------------------------------------------

    def registered_prefixes(self) -> list[Name]:
        base = self.id.name.append(APP)
        return [base.append(REQUEST), base.append(DATAGRAM)]

    @property
    def pending_datagrams(self) -> int:
        if self.mode is Mode.BASIC:
            return len(self._pending)
        return sum(len(mp.datagrams) for q in self._queues.values() for mp in q.packets.values())

    @property
    def stored_bytes(self) -> int:
        if self.mode is Mode.BASIC:
            return self._pending_bytes
        return sum(q.stored_bytes for q in self._queues.values())

    def macro_packets(self, label: str) -> list[MacroPacket]:
        q = self._queues.get(label)
        return list(q.packets.values()) if q else []

    # -- helpers -------------------------------------------------------

    def _interest(self, name: Name) -> Interest:
        return Interest(name, self.rng.getrandbits(32), self.config.interest_lifetime_ms)

    def _request(self, egress: GatewayId, seqno: int) -> Interest:
        self.counters.requests_sent += 1
        return self._interest(make_request_name(egress, self.id, seqno))

    def _egress_for(self, dgram: IpDatagram) -> GatewayId | None:
        c = self.counters
        c.captured += 1
        egress = self.table.lookup(dgram.dst)
        if egress is None:
            c.unroutable += 1
            return None
        if egress == self.id:
            c.local += 1
            return None
        if dgram.total_length > self.config.max_data_content:
            c.oversized += 1
            return None
        return egress

    # -- capture -------------------------------------------------------

    def on_ip_capture(self, dgram: IpDatagram, now: int) -> list[Packet]:
        if self.mode is Mode.BASIC:
            return self.on_ip_capture_basic(dgram, now)
        return self.on_ip_capture_improved(dgram, now)

    def on_ip_capture_basic(self, dgram: IpDatagram, now: int) -> list[Packet]:
        egress = self._egress_for(dgram)
        if egress is None:
            return []
        if self._pending_bytes + dgram.total_length > self.config.queue_byte_limit:
            self.counters.overflow += 1
            return []
        seqno = self._next_seqno
        self._next_seqno += 1
        self._pending[seqno] = _Pending(dgram, now)
        self._pending_bytes += dgram.total_length
        self.counters.tunneled += 1
        return [self._request(egress, seqno)]

    def on_ip_capture_improved(self, dgram: IpDatagram, now: int) -> list[Packet]:
        egress = self._egress_for(dgram)
        if egress is None:
            return []
        q = self._queues.get(egress.label)
        if q is None:
            q = self._queues[egress.label] = _MacroQueue(egress, self.config.seqno_origin)
        size = dgram.total_length
        if q.stored_bytes + size > self.config.queue_byte_limit:
            self.counters.overflow += 1
            return []
        q.stored_bytes += size
        self.counters.tunneled += 1

        last = q.last()
        if (
            last is not None
            and last.state is MacroState.OPEN
            and last.size + size <= self.config.max_data_content
        ):
            last.append(dgram)
            return []

        if last is not None and last.state is MacroState.OPEN:
            last.state = MacroState.REQUESTED
        mp = MacroPacket(egress, q.next_seqno, now)
        q.next_seqno += 1
        mp.append(dgram)
        q.packets[mp.seqno] = mp
        return [self._request(egress, mp.seqno)]

    # -- NDN side ------------------------------------------------------

    def on_interest(self, interest: Interest, now: int) -> list[Packet]:
        """Dispatch an Interest delivered on the application face."""
        comps = interest.name.components
        base = len(self.id.name)
        if len(comps) > base + 1 and comps[:base] == self.id.name.components and comps[base] == APP:
            method = comps[base + 1]
            if method == REQUEST:
                return self.on_interest_request(interest.name, now)
            if method == DATAGRAM:
                return self.on_interest_datagram(interest.name, now)
        self.counters.parse_errors += 1
        return []

    def on_interest_request(self, name: Name, now: int) -> list[Packet]:
        try:
            dst, src, seqno = parse_request_name(name)
        except NameParseError as exc:
            log.debug("%s: dropping request: %s", self.id, exc)
            self.counters.parse_errors += 1
            return []
        if dst != self.id or src == self.id:
            self.counters.parse_errors += 1
            return []
        self.counters.datagram_interests_sent += 1
        return [self._interest(make_datagram_name(self.mode, src, self.id, seqno))]

    def on_interest_datagram(self, name: Name, now: int) -> list[Packet]:
        try:
            requester, responder, seqno = parse_datagram_name(self.mode, name)
        except NameParseError as exc:
            log.debug("%s: dropping datagram interest: %s", self.id, exc)
            self.counters.parse_errors += 1
            return []
        if requester != self.id:
            self.counters.parse_errors += 1
            return []

        if self.mode is Mode.BASIC:
            pending = self._pending.pop(seqno, None)
            if pending is None:
                self.counters.misses += 1
                return []
            self._pending_bytes -= pending.datagram.total_length
            content = pending.datagram.to_bytes()
            n = 1
        else:
            q = self._queues.get(responder)
            mp = q.packets.pop(seqno, None) if q is not None else None
            if mp is None:
                self.counters.misses += 1
                return []
            mp.state = MacroState.IN_FLIGHT
            q.stored_bytes -= mp.size
            content = mp.serialize()
            n = len(mp.datagrams)

        self.counters.data_sent += 1
        self.counters.datagrams_sent += n
        return [Data(name, content, self.config.data_freshness_ms)]

    def on_data_arrival(self, data: Data, now: int = 0) -> list[IpDatagram]:
        try:
            requester, _, _ = parse_datagram_name(self.mode, data.name)
        except NameParseError:
            self.counters.parse_errors += 1
            return []

        if self.mode is Mode.BASIC:
            try:
                out = [IpDatagram.from_bytes(data.content)]
            except MalformedDatagram:
                self.counters.corruption += 1
                return []
        else:
            out, bad_offset = split_macro(data.content)
            if bad_offset is not None:
                log.debug("%s: corrupt macro-packet from %s at offset %d", self.id, requester, bad_offset)
                self.counters.corruption += 1
        self.counters.injected += len(out)
        return out

    # -- timers --------------------------------------------------------

    def tick(self, now: int) -> list[Packet]:
        """Expire stranded pending entries. Retransmission would hook in here."""
        deadline = now - self.config.pending_ttl_ms * 1000
        c = self.counters
        if self.mode is Mode.BASIC:
            while self._pending:
                seqno, p = next(iter(self._pending.items()))
                if p.stored_at > deadline:
                    break
                del self._pending[seqno]
                self._pending_bytes -= p.datagram.total_length
                c.expired_datagrams += 1
        else:
            for q in self._queues.values():
                stale = [
                    mp
                    for mp in q.packets.values()
                    if mp.created_at <= deadline and mp.state is not MacroState.IN_FLIGHT
                ]
                for mp in stale:
                    del q.packets[mp.seqno]
                    q.stored_bytes -= mp.size
                    c.expired_macros += 1
                    c.expired_datagrams += len(mp.datagrams)
        return []
