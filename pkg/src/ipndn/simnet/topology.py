"""Validated topology with statically derived NDN routes."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from ..gateway.routing import GatewayId
from ..ndn import Name
from .scenario import Diagnostic, Scenario, ScenarioError, validate_scenario


@dataclass
class Topology:
    scenario: Scenario
    graph: nx.Graph
    # node id -> [(prefix, next hop node id)]
    fib_routes: dict[str, list[tuple[Name, str]]] = field(default_factory=dict)
    # (subnet, gateway label), shared by every gateway
    ip_routes: list = field(default_factory=list)

    @property
    def roles(self) -> dict[str, str]:
        return {n.id: n.role for n in self.scenario.nodes}

    def ids(self, role: str) -> list[str]:
        return [n.id for n in self.scenario.nodes if n.role == role]

    def gateway_id(self, node_id: str) -> GatewayId:
        return GatewayId(self.scenario.network_prefix, node_id)


def build_topology(scenario: Scenario) -> Topology:
    validate_scenario(scenario)
    g = nx.Graph()
    for n in scenario.nodes:
        g.add_node(n.id, role=n.role)
    for link in scenario.links:
        g.add_edge(link.a, link.b)

    topo = Topology(scenario, g)
    ndn_nodes = [n.id for n in scenario.nodes if n.role != "ip-host"]
    for nid in ndn_nodes:
        topo.fib_routes[nid] = []

    gateways = topo.ids("gateway")
    for gw in gateways:
        for net in scenario.node(gw).subnets:
            topo.ip_routes.append((net, gw))

    if scenario.routes is not None:
        for r in scenario.routes:
            topo.fib_routes[r.node].append((r.prefix, r.next_hop))
        return topo

    core = g.subgraph(ndn_nodes)
    for gw in gateways:
        prefix = topo.gateway_id(gw).name
        paths = nx.single_source_shortest_path(core, gw)
        for nid in ndn_nodes:
            if nid == gw:
                continue
            path = paths.get(nid)
            if path is None:
                raise ScenarioError([Diagnostic(None, f"no NDN path from {nid} to gateway {gw}")], scenario.source)
            topo.fib_routes[nid].append((prefix, path[-2]))
    return topo
