import ipaddress
import random

import pytest

from ipndn.gateway import GatewayId, RoutingTable, route_lookup
from ipndn.ndn import Name


def gw(label):
    return GatewayId("/mynet", label)


def test_gateway_id_name():
    g = gw("nodeB")
    assert g.prefix == Name.parse("/mynet")
    assert str(g.name) == "/mynet/nodeB"
    assert g.peer("nodeA") == gw("nodeA")


def test_longest_mask_wins():
    t = RoutingTable([("10.0.0.0/8", gw("a")), ("10.1.0.0/16", gw("b")), ("0.0.0.0/0", gw("c"))])
    assert t.lookup("10.1.2.3") == gw("b")
    assert t.lookup("10.2.0.1") == gw("a")
    assert t.lookup("192.0.2.1") == gw("c")
    assert route_lookup(t, "10.1.0.0") == gw("b")


def test_no_route():
    t = RoutingTable([("192.0.2.0/24", gw("a"))])
    assert t.lookup("198.51.100.1") is None


def test_duplicate_subnet_rejected():
    with pytest.raises(ValueError):
        RoutingTable([("192.0.2.0/24", gw("a")), ("192.0.2.0/24", gw("b"))])


def test_matches_brute_force():
    rng = random.Random(5)
    entries = {}
    while len(entries) < 40:
        plen = rng.randint(0, 32)
        net = ipaddress.ip_network((rng.getrandbits(32) & (~0 << (32 - plen)) & 0xFFFFFFFF, plen))
        entries[net] = gw(f"g{len(entries)}")
    t = RoutingTable(entries.items())
    for _ in range(2000):
        a = ipaddress.IPv4Address(rng.getrandbits(32))
        hits = [(n.prefixlen, g) for n, g in entries.items() if a in n]
        want = max(hits, key=lambda h: h[0])[1] if hits else None
        assert t.lookup(a) == want
