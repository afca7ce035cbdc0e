"""Gateway identifiers and the IP-subnet-to-gateway routing table."""

from __future__ import annotations

from dataclasses import dataclass
from ipaddress import IPv4Address, IPv4Network

from ..ndn import Name


@dataclass(frozen=True)
class GatewayId:
    prefix: Name
    label: str

    def __post_init__(self) -> None:
        if isinstance(self.prefix, str):
            object.__setattr__(self, "prefix", Name.parse(self.prefix))
        if not self.label or "/" in self.label:
            raise ValueError(f"bad gateway label {self.label!r}")

    @property
    def name(self) -> Name:
        return self.prefix.append(self.label)

    def peer(self, label: str) -> GatewayId:
        """Another gateway under the same network prefix."""
        return GatewayId(self.prefix, label)

    def __str__(self) -> str:
        return str(self.name)


class RoutingTable:
    """Longest-mask match from IPv4 destination to egress gateway."""

    def __init__(self, entries=()):
        self._entries: dict[IPv4Network, GatewayId] = {}
        for subnet, gw in entries:
            self.add(subnet, gw)

    def add(self, subnet, gateway: GatewayId) -> None:
        net = IPv4Network(subnet)
        if net in self._entries:
            raise ValueError(f"duplicate routing entry for {net}")
        self._entries[net] = gateway

    def lookup(self, dst) -> GatewayId | None:
        addr = IPv4Address(dst)
        best = None
        for net, gw in self._entries.items():
            if addr in net and (best is None or net.prefixlen > best[0].prefixlen):
                best = (net, gw)
        return best[1] if best else None

    def entries(self) -> list[tuple[IPv4Network, GatewayId]]:
        return list(self._entries.items())

    def __len__(self) -> int:
        return len(self._entries)


def route_lookup(table: RoutingTable, dst) -> GatewayId | None:
    return table.lookup(dst)
