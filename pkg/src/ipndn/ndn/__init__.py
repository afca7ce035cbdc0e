from .forwarder import (
    DEFAULT_CS_CAPACITY,
    Fib,
    FibEntry,
    Forwarder,
    ForwarderCounters,
    PitEntry,
    fib_lookup,
)
from .name import Name
from .packet import (
    DEFAULT_INTEREST_LIFETIME_MS,
    MAX_DATA_CONTENT,
    Data,
    DecodeError,
    Interest,
    Packet,
    PacketTooLarge,
    decode_packet,
    encode_packet,
    wire_size,
)
