from .engine import Channel, EventLoop, SimResult, Simulation, run
from .metrics import FlowStats, compute_jitter, mean_ci95
from .scenario import (
    Diagnostic,
    LinkSpec,
    NodeSpec,
    RouteSpec,
    Scenario,
    ScenarioError,
    load_scenario,
    parse_scenario,
    resolve_scenario_path,
    validate_scenario,
)
from .topology import Topology, build_topology
from .traffic import Flow, gen_burst, gen_cbr

# datagram fates that are not deliveries; together with "delivered" they
# partition every captured datagram
DROP_FATES = (
    "unroutable",
    "local",
    "oversized",
    "overflow",
    "expired_datagrams",
    "queue_drop",
    "link_loss",
    "unsolicited",
    "no_host",
    "stranded",
)
