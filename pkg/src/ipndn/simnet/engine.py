"""Deterministic discrete-event simulation of gateways, NDN routers and hosts.

The clock is an integer count of microseconds. Events at equal times run in
scheduling order. All randomness (Interest nonces, Bernoulli link loss,
per-seed flow start offsets) comes from PRNGs seeded from the run seed, each
stream keyed by its owner so adding a node or flow never perturbs the others.
"""

from __future__ import annotations

import heapq
import logging
import random
from collections import Counter, deque
from dataclasses import dataclass, field, fields

from ..gateway import Gateway, GatewayConfig, IpDatagram, Mode, split_macro
from ..ndn import Data, Fib, Forwarder, Interest, decode_packet, encode_packet, wire_size
from .metrics import FlowStats
from .scenario import LinkSpec
from .topology import Topology
from .traffic import Flow, read_stamp, stamp_payload

log = logging.getLogger(__name__)

APP_FACE = "app"


class EventLoop:
    def __init__(self):
        self.now = 0
        self._heap: list = []
        self._seq = 0

    def at(self, time_us: int, fn, *args) -> None:
        if time_us < self.now:
            raise ValueError(f"event scheduled in the past: {time_us} < {self.now}")
        heapq.heappush(self._heap, (time_us, self._seq, fn, args))
        self._seq += 1

    def run(self, until_us: int | None = None) -> None:
        heap = self._heap
        while heap and (until_us is None or heap[0][0] <= until_us):
            t, _, fn, args = heapq.heappop(heap)
            self.now = t
            fn(*args)
        if until_us is not None:
            self.now = max(self.now, until_us)

    def __len__(self) -> int:
        return len(self._heap)


class Channel:
    """One direction of a link: FIFO store-and-forward, optional finite queue.

    Service time is ``per_packet_us`` plus serialization at the link rate; the
    packet then propagates for ``delay``. With ``queue_limit`` set, a packet
    arriving while that many packets already wait behind the one in service
    is tail-dropped.
    """

    def __init__(self, sim: Simulation, src: str, dst: str, spec: LinkSpec, rng: random.Random):
        self.sim = sim
        self.src = src
        self.dst = dst
        self.delay_us = int(round(spec.delay_ms * 1000))
        self.bandwidth = int(spec.bandwidth_bps)
        self.per_packet_us = int(round(spec.per_packet_us))
        self.queue_limit = spec.queue_limit
        self.loss = spec.loss
        self.rng = rng
        self._departures: deque[int] = deque()
        self.tx_packets = 0
        self.tx_octets = 0
        self.queue_drops = 0
        self.loss_drops = 0

    def send(self, payload, size: int) -> bool:
        now = self.sim.loop.now
        deps = self._departures
        while deps and deps[0] <= now:
            deps.popleft()
        if self.queue_limit is not None and len(deps) > self.queue_limit:
            self.queue_drops += 1
            self.sim.lost(payload, "queue_drop", self)
            return False
        start = deps[-1] if deps else now
        done = start + self.per_packet_us + -(-size * 8_000_000 // self.bandwidth)
        deps.append(done)
        self.tx_packets += 1
        self.tx_octets += size
        if self.loss > 0 and self.rng.random() < self.loss:
            self.loss_drops += 1
            self.sim.lost(payload, "link_loss", self)
            return False
        self.sim.loop.at(done + self.delay_us, self.sim.nodes[self.dst].receive, self.src, payload)
        return True


class Node:
    def __init__(self, sim: Simulation, node_id: str):
        self.sim = sim
        self.id = node_id
        self.channels: dict[str, Channel] = {}

    def receive(self, from_id: str, payload) -> None:
        raise NotImplementedError

    def tick(self, now: int) -> None:
        pass


class RouterNode(Node):
    def __init__(self, sim, node_id, forwarder: Forwarder):
        super().__init__(sim, node_id)
        self.forwarder = forwarder

    def receive(self, from_id, payload) -> None:
        packet = decode_packet(payload) if self.sim.wire else payload
        self.handle(packet, from_id)

    def handle(self, packet, in_face) -> None:
        fwd = self.forwarder
        now = self.sim.loop.now
        if isinstance(packet, Interest):
            out = fwd.on_interest(packet, in_face, now)
        else:
            before = fwd.counters.unsolicited
            out = fwd.on_data(packet, in_face, now)
            if fwd.counters.unsolicited != before:
                self.sim.lost(packet, "unsolicited")
        for face, pkt in out:
            if face == APP_FACE:
                self.to_app(pkt)
            else:
                self.transmit(face, pkt)

    def transmit(self, face: str, packet) -> None:
        if self.sim.wire:
            wire = encode_packet(packet, self.sim.max_content)
            self.channels[face].send(wire, len(wire))
        else:
            self.channels[face].send(packet, self.sim.packet_size(packet))

    def to_app(self, packet) -> None:
        pass

    def tick(self, now: int) -> None:
        self.forwarder.purge(now)


class GatewayNode(RouterNode):
    def __init__(self, sim, node_id, forwarder, gateway: Gateway, hosts: dict):
        super().__init__(sim, node_id, forwarder)
        self.gateway = gateway
        # host address -> host node id
        self.hosts = hosts

    def originate(self, packets) -> None:
        trace = self.sim.trace
        for pkt in packets:
            if trace is not None:
                trace(self.sim.loop.now, self.id, pkt)
            self.handle(pkt, APP_FACE)

    def receive(self, from_id, payload) -> None:
        if isinstance(payload, IpDatagram):
            self.originate(self.gateway.on_ip_capture(payload, self.sim.loop.now))
        else:
            super().receive(from_id, payload)

    def to_app(self, packet) -> None:
        now = self.sim.loop.now
        if isinstance(packet, Interest):
            self.originate(self.gateway.on_interest(packet, now))
            return
        for dgram in self.gateway.on_data_arrival(packet, now):
            host = self.hosts.get(dgram.dst)
            if host is None:
                self.sim.fates["no_host"] += 1
                continue
            self.channels[host].send(dgram, dgram.total_length)

    def tick(self, now: int) -> None:
        self.originate(self.gateway.tick(now))
        super().tick(now)


class HostNode(Node):
    def __init__(self, sim, node_id, address):
        super().__init__(sim, node_id)
        self.address = address

    def receive(self, from_id, dgram: IpDatagram) -> None:
        self.sim.deliver(self, dgram)


@dataclass
class SimResult:
    mode: Mode
    seed: int
    duration_ms: float
    flows: dict[str, FlowStats]
    nodes: dict[str, dict]
    fates: Counter = field(default_factory=Counter)

    @property
    def gateway_ndn_originated(self) -> int:
        return sum(n.get("ndn_originated", 0) for n in self.nodes.values() if n["role"] == "gateway")

    @property
    def captured(self) -> int:
        return sum(n.get("captured", 0) for n in self.nodes.values() if n["role"] == "gateway")

    @property
    def delivered(self) -> int:
        return self.fates["delivered"]

    @property
    def macro_packets(self) -> int:
        """Data packets originated by gateways (one per macro-packet or datagram)."""
        return sum(n.get("data_sent", 0) for n in self.nodes.values() if n["role"] == "gateway")


class Simulation:
    def __init__(
        self,
        topology: Topology,
        workload: list[Flow] | None = None,
        seed: int = 0,
        mode: Mode | str | None = None,
        wire: bool = True,
        trace=None,
    ):
        sc = topology.scenario
        # called as trace(now_us, node_id, packet) for every gateway-originated packet
        self.trace = trace
        self.topology = topology
        self.seed = seed
        self.mode = Mode(mode) if mode is not None else sc.mode
        self.wire = wire
        self.workload = list(sc.flows if workload is None else workload)
        self.loop = EventLoop()
        self.nodes: dict[str, Node] = {}
        self.fates: Counter = Counter()
        self.flow_stats: dict[str, FlowStats] = {}
        self._seen: list[set] = []
        self._max_seq: list[int] = []

        gw_defaults = dict(sc.gateway_params)
        self.max_content = gw_defaults.get("max_data_content", GatewayConfig("x").max_data_content)
        self.ttl_ms = 0
        roles = topology.roles
        for spec in sc.nodes:
            if spec.role == "ip-host":
                self.nodes[spec.id] = HostNode(self, spec.id, spec.address)
                continue
            fib = Fib()
            for prefix, hop in topology.fib_routes.get(spec.id, []):
                fib.add(prefix, hop)
            fwd = Forwarder(fib, cs_capacity=sc.cs_capacity)
            if spec.role == "ndn-router":
                self.nodes[spec.id] = RouterNode(self, spec.id, fwd)
                continue
            params = {**gw_defaults, **spec.params}
            cfg = GatewayConfig(
                label=spec.id,
                prefix=sc.network_prefix,
                mode=self.mode,
                routes=list(topology.ip_routes),
                **params,
            )
            self.max_content = max(self.max_content, cfg.max_data_content)
            self.ttl_ms = max(self.ttl_ms, cfg.pending_ttl_ms + cfg.interest_lifetime_ms)
            gw = Gateway(cfg, random.Random(f"{seed}/nonce/{spec.id}"))
            for prefix in gw.registered_prefixes():
                fib.add(prefix, APP_FACE)
            hosts = {}
            for nbr in topology.graph.neighbors(spec.id):
                if roles[nbr] == "ip-host":
                    hosts[sc.node(nbr).address] = nbr
            self.nodes[spec.id] = GatewayNode(self, spec.id, fwd, gw, hosts)

        for link in sc.links:
            for a, b in ((link.a, link.b), (link.b, link.a)):
                rng = random.Random(f"{seed}/loss/{a}>{b}")
                self.nodes[a].channels[b] = Channel(self, a, b, link, rng)

    def packet_size(self, packet) -> int:
        return wire_size(packet)

    # -- datagram fate accounting --------------------------------------

    def lost(self, payload, reason: str, channel: Channel | None = None) -> None:
        if isinstance(payload, IpDatagram):
            # losses on the host uplink happen before capture
            if channel is not None and isinstance(self.nodes[channel.src], HostNode):
                reason = "uplink_" + reason
            self.fates[reason] += 1
            return
        if isinstance(payload, (bytes, bytearray)):
            payload = decode_packet(payload, self.max_content)
        if isinstance(payload, Data) and b"datagram" in payload.name.components:
            dgrams, _ = split_macro(payload.content)
            self.fates[reason] += len(dgrams)

    def deliver(self, host: HostNode, dgram: IpDatagram) -> None:
        now = self.loop.now
        index, seq, sent_at = read_stamp(dgram.payload)
        flow = self.workload[index]
        st = self.flow_stats[flow.flow_id]
        self.fates["delivered"] += 1
        if seq in self._seen[index]:
            st.duplicates += 1
            return
        self._seen[index].add(seq)
        if seq < self._max_seq[index]:
            st.reordered += 1
        self._max_seq[index] = max(self._max_seq[index], seq)
        st.received_packets += 1
        st.received_octets += dgram.total_length
        st.latencies.append((now - sent_at) / 1000.0)

    # -- workload ------------------------------------------------------

    def _start_flows(self, horizon_us: int) -> None:
        for index, flow in enumerate(self.workload):
            offset = 0
            if flow.start_jitter_ms > 0:
                rng = random.Random(f"{self.seed}/start/{flow.flow_id}")
                offset = int(rng.uniform(0, flow.start_jitter_ms) * 1000)
            st = FlowStats(flow.flow_id, flow.src, flow.dst)
            st.start_us = int(round(flow.start_ms * 1000)) + offset
            st.stop_us = min(int(round(flow.stop_ms * 1000)) + offset, horizon_us)
            self.flow_stats[flow.flow_id] = st
            self._seen.append(set())
            self._max_seq.append(-1)
            times = flow.send_times(offset, horizon_us)
            src = self.nodes[flow.src]
            dst = self.nodes[flow.dst]
            first = next(times, None)
            if first is not None:
                self.loop.at(first, self._send, index, flow, src, dst, times, 0)

    def _send(self, index, flow, src: HostNode, dst: HostNode, times, seq) -> None:
        now = self.loop.now
        dgram = IpDatagram(src.address, dst.address, stamp_payload(index, seq, now, flow.size))
        st = self.flow_stats[flow.flow_id]
        st.sent_packets += 1
        st.sent_octets += dgram.total_length
        (gw,) = src.channels
        src.channels[gw].send(dgram, dgram.total_length)
        nxt = next(times, None)
        if nxt is not None:
            self.loop.at(nxt, self._send, index, flow, src, dst, times, seq + 1)

    def _tick(self, end_us: int, period_us: int) -> None:
        now = self.loop.now
        for node in self.nodes.values():
            node.tick(now)
        if now + period_us <= end_us:
            self.loop.at(now + period_us, self._tick, end_us, period_us)

    # -- run -----------------------------------------------------------

    def run(self, duration_ms: float) -> SimResult:
        if duration_ms <= 0:
            raise ValueError("duration must be > 0")
        horizon = int(round(duration_ms * 1000))
        # past the horizon no new traffic starts; the drain lets every pending
        # exchange finish or expire so each capture has a final fate
        end = horizon + (self.ttl_ms + 1000) * 1000
        period = int(self.topology.scenario.tick_ms * 1000)
        self._start_flows(horizon)
        self.loop.at(0, self._tick, end, period)
        self.loop.run(end)
        return self._result(duration_ms)

    def _result(self, duration_ms) -> SimResult:
        nodes = {}
        for nid, node in self.nodes.items():
            row = {"role": self.topology.roles[nid]}
            if isinstance(node, RouterNode):
                row.update({f.name: getattr(node.forwarder.counters, f.name)
                            for f in fields(node.forwarder.counters)})
            if isinstance(node, GatewayNode):
                gc = node.gateway.counters
                row.update({f.name: getattr(gc, f.name) for f in fields(gc)})
                row["ndn_originated"] = gc.ndn_originated
                for reason in ("unroutable", "local", "oversized", "overflow", "expired_datagrams", "corruption"):
                    self.fates[reason] += getattr(gc, reason)
                self.fates["stranded"] += node.gateway.pending_datagrams
            row["tx_packets"] = sum(ch.tx_packets for ch in node.channels.values())
            row["tx_octets"] = sum(ch.tx_octets for ch in node.channels.values())
            row["queue_drops"] = sum(ch.queue_drops for ch in node.channels.values())
            row["loss_drops"] = sum(ch.loss_drops for ch in node.channels.values())
            nodes[nid] = row
        return SimResult(self.mode, self.seed, duration_ms, dict(self.flow_stats), nodes, self.fates)


def run(topology: Topology, workload=None, seed: int = 0, duration_ms: float = 1000.0,
        mode: Mode | str | None = None, wire: bool = True) -> SimResult:
    """Simulate ``workload`` (default: the scenario's flows) for ``duration_ms``."""
    return Simulation(topology, workload, seed, mode, wire).run(duration_ms)
