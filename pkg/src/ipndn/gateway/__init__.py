from .gateway import (
    DATA_FRESHNESS_MS,
    PENDING_TTL_MS,
    QUEUE_BYTE_LIMIT,
    Gateway,
    GatewayConfig,
    GatewayCounters,
    MacroPacket,
    MacroState,
)
from .ip import HEADER_LEN, IpDatagram, MalformedDatagram, join_macro, split_macro
from .naming import (
    Mode,
    NameParseError,
    make_datagram_name,
    make_request_name,
    parse_datagram_name,
    parse_request_name,
)
from .routing import GatewayId, RoutingTable, route_lookup
