import pytest
from hypothesis import given, strategies as st

from ipndn.ndn import Name


def test_render_and_parse():
    n = Name.parse("/mynet/nodeA/ip/request/nodeB/3")
    assert len(n) == 6
    assert n[1] == b"nodeA"
    assert str(n) == "/mynet/nodeA/ip/request/nodeB/3"


def test_of_mixed_types():
    assert Name.of("mynet", b"x", 7) == Name.parse("/mynet/x/7")


def test_escaping_round_trip():
    n = Name((b"a b", b"\x00\xff", b"%"))
    assert Name.parse(str(n)) == n


def test_slash_in_component_rejected():
    with pytest.raises(ValueError):
        Name((b"a/b",))


def test_empty_component_rejected():
    with pytest.raises(ValueError):
        Name((b"a", b""))
    with pytest.raises(ValueError):
        Name.parse("/a//b")


def test_prefix_relations():
    p = Name.parse("/mynet/nodeB")
    assert p.is_prefix_of(Name.parse("/mynet/nodeB/ip/datagram/3"))
    assert not p.is_prefix_of(Name.parse("/mynet/nodeBB/ip"))
    assert not Name.parse("/mynet/nodeB/ip").is_prefix_of(p)
    assert Name.parse("/").is_prefix_of(p)


def test_slicing_and_append():
    n = Name.parse("/a/b/c")
    assert n[:2] == Name.parse("/a/b")
    assert n[:2].append("c") == n
    assert Name.parse("/a") + Name.parse("/b/c") == n


components = st.binary(min_size=1, max_size=12).filter(lambda b: b"/" not in b)


@given(st.lists(components, min_size=1, max_size=8))
def test_text_round_trip(comps):
    n = Name(tuple(comps))
    assert Name.parse(str(n)) == n
