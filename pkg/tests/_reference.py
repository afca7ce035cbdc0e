"""Brute-force reference forwarder and a randomized multi-node driver.

The reference keeps every table as a flat list and rescans it on every
packet, so it shares no lookup structure with the real forwarder.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import networkx as nx

from ipndn.ndn import Data, Fib, Forwarder, Interest, Name


class ReferenceForwarder:
    def __init__(self, fib_rows, cs_capacity, default_lifetime_ms=4000):
        # fib_rows: list of (component tuple, [faces])
        self.fib = [(tuple(p), list(f)) for p, f in fib_rows]
        self.pit = []  # dicts: name, expiry, faces (list), nonces (list)
        self.cs = []  # (name, data, inserted_at) oldest first
        self.cap = cs_capacity
        self.default_lifetime_ms = default_lifetime_ms

    def _pit_row(self, name, now):
        rows = [r for r in self.pit if r["name"] == name]
        assert len(rows) <= 1
        if rows and rows[0]["expiry"] <= now:
            self.pit.remove(rows[0])
            return None
        return rows[0] if rows else None

    def _fib_faces(self, name):
        comps = name.components
        matches = [(len(p), faces) for p, faces in self.fib if comps[: len(p)] == p]
        if not matches:
            return []
        return list(max(matches, key=lambda m: m[0])[1])

    def on_interest(self, interest, face, now):
        for n, d, t in self.cs:
            if n == interest.name and now < t + d.freshness_ms * 1000:
                return [(face, d)]
        row = self._pit_row(interest.name, now)
        if row is not None:
            if interest.nonce in row["nonces"]:
                return []
            row["nonces"].append(interest.nonce)
            if face not in row["faces"]:
                row["faces"].append(face)
            return []
        out = [f for f in self._fib_faces(interest.name) if f != face]
        if not out:
            return []
        life = interest.lifetime_ms or self.default_lifetime_ms
        self.pit.append({"name": interest.name, "expiry": now + life * 1000, "faces": [face], "nonces": [interest.nonce]})
        return [(f, interest) for f in out]

    def on_data(self, data, face, now):
        row = self._pit_row(data.name, now)
        if row is None:
            return []
        self.pit.remove(row)
        if self.cap > 0:
            self.cs = [e for e in self.cs if e[0] != data.name] + [(data.name, data, now)]
            if len(self.cs) > self.cap:
                self.cs = self.cs[len(self.cs) - self.cap:]
        return [(f, data) for f in row["faces"] if f != face]


@dataclass
class ConformanceReport:
    packets: int = 0
    divergences: list = field(default_factory=list)
    balance_violations: list = field(default_factory=list)
    aggregated: int = 0
    duplicate_nonce: int = 0
    cs_hits: int = 0
    data_delivered: int = 0


def random_topology(rng: random.Random, n=5):
    g = nx.random_labeled_tree(n, seed=rng.randrange(2**31)) if hasattr(nx, "random_labeled_tree") else nx.random_tree(n, seed=rng.randrange(2**31))
    nodes = list(g.nodes)
    for _ in range(rng.randint(0, 4)):
        a, b = rng.sample(nodes, 2)
        g.add_edge(a, b)
    return g


def run_conformance(seed: int, packets: int = 1000, n_nodes: int = 5) -> ConformanceReport:
    """Drive ``packets`` consumer Interests through a random 5-node NDN graph.

    Every router runs the real forwarder and the reference side by side;
    any difference in emitted (face, packet) lists is a divergence.
    """
    rng = random.Random(seed)
    g = random_topology(rng, n_nodes)
    nodes = sorted(g.nodes)
    producers = {node: Name.of("p", node) for node in nodes}
    names = [producers[p].append(k) for p in nodes for k in range(4)]

    real, ref = {}, {}
    for node in nodes:
        rows = []
        for owner, prefix in producers.items():
            if owner == node:
                faces = ["app"]
            else:
                nbrs = sorted(g.neighbors(node))
                # random multipath next hops, which creates forwarding loops
                faces = rng.sample(nbrs, rng.randint(1, len(nbrs)))
            rows.append((prefix.components, faces))
        if rng.random() < 0.5:
            rows.append(((), [rng.choice(sorted(g.neighbors(node)))]))
        cap = rng.choice([0, 2, 8])
        fib = Fib()
        for comps, faces in rows:
            fib.add(Name(comps), *faces)
        real[node] = Forwarder(fib, cs_capacity=cap)
        ref[node] = ReferenceForwarder(rows, cap)

    report = ConformanceReport()
    asked = {}  # (node, face) -> number of Interests received on that face
    answered = {}  # (node, face) -> number of Data sent on that face
    now = 0
    inflight = []  # (node, from_face, packet)
    injected = 0
    recent = []

    def step(node, face, pkt):
        report.packets += 1
        if isinstance(pkt, Interest):
            asked[(node, face)] = asked.get((node, face), 0) + 1
            got = real[node].on_interest(pkt, face, now)
            want = ref[node].on_interest(pkt, face, now)
        else:
            got = real[node].on_data(pkt, face, now)
            want = ref[node].on_data(pkt, face, now)
        if got != want:
            report.divergences.append((now, node, face, pkt, got, want))
        for out_face, out in got:
            if isinstance(out, Data):
                answered[(node, out_face)] = answered.get((node, out_face), 0) + 1
            if out_face == "app":
                if isinstance(out, Interest) and out.name[:2] == producers[node]:
                    inflight.append((node, "app", Data(out.name, b"v%d" % now, rng.choice([0, 5, 50]))))
                elif isinstance(out, Data):
                    report.data_delivered += 1
            else:
                inflight.append((out_face, node, out))

    while injected < packets or inflight:
        now += rng.choice([50, 100, 1000])
        if injected < packets and (not inflight or rng.random() < 0.4):
            node = rng.choice(nodes)
            if recent and rng.random() < 0.15:
                # retransmission with the same nonce, or a replay at another router
                name, nonce = rng.choice(recent)
            else:
                name, nonce = rng.choice(names), rng.getrandbits(32)
                recent = (recent + [(name, nonce)])[-20:]
            inflight.append((node, "app", Interest(name, nonce, rng.choice([0, 5, 20]))))
            injected += 1
            continue
        node, face, pkt = inflight.pop(rng.randrange(len(inflight)))
        step(node, face, pkt)

    for key, n in answered.items():
        if n > asked.get(key, 0):
            report.balance_violations.append((key, n, asked.get(key, 0)))
    for fwd in real.values():
        report.aggregated += fwd.counters.aggregated
        report.duplicate_nonce += fwd.counters.duplicate_nonce
        report.cs_hits += fwd.counters.cs_hits
    return report
