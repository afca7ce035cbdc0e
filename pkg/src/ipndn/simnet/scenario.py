"""Scenario documents: YAML topology + workload, with line-anchored validation.

See docs/scenario-schema.md for the full schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from ipaddress import IPv4Address, IPv4Network
from pathlib import Path

import networkx as nx
import yaml

from ..gateway.naming import Mode
from ..ndn import DEFAULT_CS_CAPACITY, Name
from .traffic import MIN_PAYLOAD, Flow

ROLES = ("ndn-router", "gateway", "ip-host")
GATEWAY_PARAMS = (
    "max_data_content",
    "queue_byte_limit",
    "pending_ttl_ms",
    "interest_lifetime_ms",
    "data_freshness_ms",
)
_LINE = "__line__"


@dataclass
class Diagnostic:
    line: int | None
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}" if self.line else self.message


class ScenarioError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic], source: str = "<scenario>"):
        self.diagnostics = diagnostics
        self.source = source
        super().__init__("\n".join(f"{source}: {d}" for d in diagnostics))


@dataclass
class NodeSpec:
    id: str
    role: str
    address: IPv4Address | None = None
    subnets: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    line: int | None = None


@dataclass
class LinkSpec:
    a: str
    b: str
    delay_ms: float = 1.0
    bandwidth_bps: float = 100e6
    loss: float = 0.0
    queue_limit: int | None = None
    per_packet_us: float = 0.0
    line: int | None = None


@dataclass
class RouteSpec:
    node: str
    prefix: Name
    next_hop: str
    line: int | None = None


@dataclass
class Scenario:
    name: str
    network_prefix: Name
    nodes: list[NodeSpec]
    links: list[LinkSpec]
    routes: list[RouteSpec] | None = None
    flows: list[Flow] = field(default_factory=list)
    flow_lines: list = field(default_factory=list)
    mode: Mode = Mode.BASIC
    gateway_params: dict = field(default_factory=dict)
    cs_capacity: int = DEFAULT_CS_CAPACITY
    tick_ms: float = 100.0
    source: str = "<scenario>"

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node, deep=False):
    mapping = loader.construct_mapping(node, deep=deep)
    mapping[_LINE] = node.start_mark.line + 1
    return mapping


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def resolve_scenario_path(ref: str | Path) -> Path:
    """A filesystem path, or the name of a bundled scenario such as ``paper-fig2``."""
    p = Path(ref)
    if p.exists():
        return p
    name = p.name if p.suffix in (".yaml", ".yml") else p.name + ".yaml"
    bundled = resources.files("ipndn.scenarios").joinpath(name)
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"scenario not found: {ref}")


def load_scenario(ref: str | Path) -> Scenario:
    path = resolve_scenario_path(ref)
    return parse_scenario(path.read_text(encoding="utf-8"), source=str(ref))


class _Collector:
    def __init__(self):
        self.diags: list[Diagnostic] = []

    def error(self, line, message):
        self.diags.append(Diagnostic(line, message))

    def number(self, d, key, default, line, *, lo=None, hi=None, integer=False, positive=False):
        raw = d.get(key, default)
        if raw is None:
            return None
        try:
            if isinstance(raw, bool):
                raise ValueError
            v = float(raw)
            if integer:
                if not v.is_integer():
                    raise ValueError
                v = int(v)
        except (TypeError, ValueError):
            kind = "an integer" if integer else "a number"
            self.error(line, f"{key}: expected {kind}, got {raw!r}")
            return default
        if positive and v <= 0:
            self.error(line, f"{key}: must be > 0, got {v}")
        elif (lo is not None and v < lo) or (hi is not None and v > hi):
            upper = hi if hi is not None else "inf"
            self.error(line, f"{key}: {v} is out of range [{lo}, {upper}]")
        return v


def _seq(doc, key, c: _Collector, line):
    items = doc.get(key) or []
    if not isinstance(items, list):
        c.error(line, f"'{key}' must be a list")
        return []
    out = []
    for item in items:
        if not isinstance(item, dict):
            c.error(line, f"'{key}' entries must be mappings, got {item!r}")
            continue
        out.append(item)
    return out


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    try:
        doc = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError([Diagnostic(mark.line + 1 if mark else None, f"YAML syntax: {exc}")], source)
    if not isinstance(doc, dict):
        raise ScenarioError([Diagnostic(1, "scenario must be a mapping")], source)

    c = _Collector()
    top = doc.get(_LINE, 1)

    try:
        prefix = Name.parse(str(doc.get("network_prefix", "/mynet")))
    except ValueError as exc:
        c.error(top, f"network_prefix: {exc}")
        prefix = Name.of("mynet")
    try:
        mode = Mode(doc.get("mode", "basic"))
    except ValueError:
        c.error(top, f"mode: expected 'basic' or 'improved', got {doc.get('mode')!r}")
        mode = Mode.BASIC

    gw_doc = doc.get("gateway") or {}
    gw_params = {}
    for k in GATEWAY_PARAMS:
        if k in gw_doc:
            gw_params[k] = c.number(gw_doc, k, None, gw_doc.get(_LINE, top), integer=True, positive=True)

    nodes = []
    for d in _seq(doc, "nodes", c, top):
        line = d.get(_LINE)
        nid = d.get("id")
        if not isinstance(nid, str) or not nid or "/" in nid:
            c.error(line, f"node id must be a non-empty string without '/', got {nid!r}")
            continue
        role = d.get("role")
        if role not in ROLES:
            c.error(line, f"node {nid}: role must be one of {', '.join(ROLES)}, got {role!r}")
            continue
        spec = NodeSpec(nid, role, line=line)
        if role == "ip-host":
            try:
                spec.address = IPv4Address(str(d.get("address")))
            except ValueError:
                c.error(line, f"node {nid}: bad or missing IPv4 address {d.get('address')!r}")
        if role == "gateway":
            for s in d.get("subnets") or []:
                try:
                    spec.subnets.append(IPv4Network(str(s)))
                except ValueError:
                    c.error(line, f"node {nid}: bad subnet {s!r}")
            for k in GATEWAY_PARAMS:
                if k in d:
                    spec.params[k] = c.number(d, k, None, line, integer=True, positive=True)
        nodes.append(spec)

    links = []
    for d in _seq(doc, "links", c, top):
        line = d.get(_LINE)
        a, b = d.get("a"), d.get("b")
        if not isinstance(a, str) or not isinstance(b, str):
            c.error(line, "link needs string endpoints 'a' and 'b'")
            continue
        links.append(
            LinkSpec(
                a,
                b,
                delay_ms=c.number(d, "delay_ms", 1.0, line, lo=0),
                bandwidth_bps=c.number(d, "bandwidth_bps", 100e6, line, positive=True),
                loss=c.number(d, "loss", 0.0, line, lo=0, hi=1),
                queue_limit=c.number(d, "queue_limit", None, line, lo=0, integer=True),
                per_packet_us=c.number(d, "per_packet_us", 0.0, line, lo=0),
                line=line,
            )
        )

    routes = None
    if doc.get("routes") not in (None, "auto"):
        routes = []
        for d in _seq(doc, "routes", c, top):
            line = d.get(_LINE)
            try:
                rprefix = Name.parse(str(d.get("prefix")))
            except ValueError as exc:
                c.error(line, f"route prefix: {exc}")
                continue
            routes.append(RouteSpec(str(d.get("node")), rprefix, str(d.get("next_hop")), line))

    flows, flow_lines = [], []
    for d in _seq(doc, "flows", c, top):
        line = d.get(_LINE)
        kind = d.get("kind", "cbr")
        fid = str(d.get("id", f"flow{len(flows)}"))
        if kind not in ("cbr", "burst"):
            c.error(line, f"flow {fid}: kind must be 'cbr' or 'burst', got {kind!r}")
            continue
        n_before = len(c.diags)
        size = c.number(d, "size", 1472, line, lo=MIN_PAYLOAD, hi=65515, integer=True)
        start = c.number(d, "start_ms", 0.0, line, lo=0)
        stop = c.number(d, "stop_ms", None, line, lo=0)
        if stop is None:
            c.error(line, f"flow {fid}: stop_ms is required")
        kw = dict(start_jitter_ms=c.number(d, "start_jitter_ms", 0.0, line, lo=0))
        if kind == "cbr":
            kw["rate_pps"] = c.number(d, "rate_pps", None, line, positive=True)
            if kw["rate_pps"] is None:
                c.error(line, f"flow {fid}: rate_pps is required")
        else:
            kw["burst"] = c.number(d, "burst", 1, line, lo=1, integer=True)
            kw["gap_ms"] = c.number(d, "gap_ms", None, line, positive=True)
            if kw["gap_ms"] is None:
                c.error(line, f"flow {fid}: gap_ms is required")
        if len(c.diags) > n_before:
            continue
        flows.append(Flow(fid, str(d.get("src")), str(d.get("dst")), size, start, stop, kind=kind, **kw))
        flow_lines.append(line)

    scenario = Scenario(
        name=str(doc.get("name", Path(source).stem)),
        network_prefix=prefix,
        nodes=nodes,
        links=links,
        routes=routes,
        flows=flows,
        flow_lines=flow_lines,
        mode=mode,
        gateway_params=gw_params,
        cs_capacity=c.number(doc, "cs_capacity", DEFAULT_CS_CAPACITY, top, lo=0, integer=True),
        tick_ms=c.number(doc, "tick_ms", 100.0, top, positive=True),
        source=source,
    )
    if c.diags:
        raise ScenarioError(c.diags, source)
    validate_scenario(scenario)
    return scenario


def validate_scenario(s: Scenario) -> None:
    """Topology-level invariants. Raises ScenarioError listing every violation."""
    c = _Collector()
    by_id: dict[str, NodeSpec] = {}
    for n in s.nodes:
        if n.id in by_id:
            c.error(n.line, f"duplicate node id '{n.id}' (first defined at line {by_id[n.id].line})")
        else:
            by_id[n.id] = n

    g = nx.Graph()
    g.add_nodes_from(by_id)
    seen_links = {}
    for link in s.links:
        for end in (link.a, link.b):
            if end not in by_id:
                c.error(link.line, f"link endpoint '{end}' is not a defined node")
        if link.a == link.b:
            c.error(link.line, f"link from '{link.a}' to itself")
        key = frozenset((link.a, link.b))
        if key in seen_links:
            c.error(link.line, f"duplicate link {link.a} -- {link.b} (also at line {seen_links[key]})")
        seen_links[key] = link.line
        if link.a in by_id and link.b in by_id:
            g.add_edge(link.a, link.b)
            ra, rb = by_id[link.a].role, by_id[link.b].role
            if "ip-host" in (ra, rb) and {ra, rb} != {"ip-host", "gateway"}:
                c.error(link.line, f"ip-host links must attach to a gateway ({link.a} -- {link.b})")

    if by_id and not c.diags and not nx.is_connected(g):
        parts = sorted(sorted(p) for p in nx.connected_components(g))
        c.error(None, f"topology is disconnected: components {parts}")

    subnet_owner: dict[IPv4Network, str] = {}
    for n in by_id.values():
        nbr_roles = [by_id[m].role for m in g.neighbors(n.id)] if n.id in g else []
        if n.role == "gateway":
            if "ndn-router" not in nbr_roles and "gateway" not in nbr_roles:
                c.error(n.line, f"gateway '{n.id}' has no link to the NDN core")
            if "ip-host" not in nbr_roles:
                c.error(n.line, f"gateway '{n.id}' has no link to an IP host")
            if not n.subnets:
                c.error(n.line, f"gateway '{n.id}' declares no subnets")
            for net in n.subnets:
                if net in subnet_owner:
                    c.error(n.line, f"subnet {net} already served by '{subnet_owner[net]}'")
                subnet_owner[net] = n.id
        elif n.role == "ip-host" and n.address is not None:
            gws = [m for m in g.neighbors(n.id)] if n.id in g else []
            if len(gws) != 1:
                c.error(n.line, f"ip-host '{n.id}' must attach to exactly one gateway")
            elif not any(n.address in net for net in by_id[gws[0]].subnets):
                c.error(n.line, f"host address {n.address} is outside the subnets of gateway '{gws[0]}'")

    if s.routes is not None:
        for r in s.routes:
            if r.node not in by_id or by_id[r.node].role == "ip-host":
                c.error(r.line, f"route node '{r.node}' is not an NDN node")
            elif not g.has_edge(r.node, r.next_hop):
                c.error(r.line, f"route next_hop '{r.next_hop}' is not a neighbour of '{r.node}'")

    flow_ids = set()
    for i, f in enumerate(s.flows):
        line = s.flow_lines[i] if i < len(s.flow_lines) else None
        if f.flow_id in flow_ids:
            c.error(line, f"duplicate flow id '{f.flow_id}'")
        flow_ids.add(f.flow_id)
        for end in (f.src, f.dst):
            if end not in by_id or by_id[end].role != "ip-host":
                c.error(line, f"flow {f.flow_id}: '{end}' is not an ip-host")
        if f.stop_ms <= f.start_ms:
            c.error(line, f"flow {f.flow_id}: stop_ms must be after start_ms")

    if c.diags:
        raise ScenarioError(c.diags, s.source)
