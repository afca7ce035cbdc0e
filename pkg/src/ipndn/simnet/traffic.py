"""iperf-style workload generators.

Each datagram payload starts with a 16-octet stamp (flow index, sequence
number, send time in µs) the receiving host uses for loss and latency
accounting, the way iperf's UDP mode stamps its packets.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

STAMP = struct.Struct(">IIQ")
MIN_PAYLOAD = STAMP.size


@dataclass(frozen=True)
class Flow:
    flow_id: str
    src: str
    dst: str
    size: int  # IP payload octets
    start_ms: float
    stop_ms: float
    rate_pps: float = 0.0  # bursts per second for burst flows
    burst: int = 1
    gap_ms: float = 0.0
    kind: str = "cbr"
    # uniform random start offset drawn per seed, in [0, start_jitter_ms)
    start_jitter_ms: float = 0.0

    def __post_init__(self) -> None:
        if self.size < MIN_PAYLOAD:
            raise ValueError(f"flow {self.flow_id}: payload must be at least {MIN_PAYLOAD} octets")
        if self.burst < 1:
            raise ValueError(f"flow {self.flow_id}: burst size must be >= 1")
        if self.kind == "cbr" and self.rate_pps <= 0:
            raise ValueError(f"flow {self.flow_id}: rate must be > 0")
        if self.kind == "burst" and self.gap_ms <= 0:
            raise ValueError(f"flow {self.flow_id}: inter-burst gap must be > 0")

    @property
    def total_length(self) -> int:
        return 20 + self.size

    def send_times(self, offset_us: int = 0, horizon_us: int | None = None):
        """Yield capture times in µs; bursts repeat the same timestamp."""
        start = int(round(self.start_ms * 1000)) + offset_us
        stop = int(round(self.stop_ms * 1000)) + offset_us
        if horizon_us is not None:
            stop = min(stop, horizon_us)
        if self.kind == "cbr":
            period_us = 1_000_000 / self.rate_pps
        else:
            period_us = self.gap_ms * 1000
        k = 0
        while True:
            t = start + int(k * period_us)
            if t >= stop:
                return
            for _ in range(self.burst):
                yield t
            k += 1


def gen_cbr(flow_id, src, dst, size, rate_pps, start_ms, stop_ms, start_jitter_ms=0.0) -> Flow:
    return Flow(flow_id, src, dst, size, start_ms, stop_ms, rate_pps=rate_pps,
                start_jitter_ms=start_jitter_ms)


def gen_burst(flow_id, src, dst, burst, size, gap_ms, start_ms=0.0, stop_ms=1000.0,
              start_jitter_ms=0.0) -> Flow:
    return Flow(flow_id, src, dst, size, start_ms, stop_ms, burst=burst, gap_ms=gap_ms,
                kind="burst", start_jitter_ms=start_jitter_ms)


def stamp_payload(flow_index: int, seq: int, now_us: int, size: int) -> bytes:
    head = STAMP.pack(flow_index, seq, now_us)
    return head + bytes(size - len(head))


def read_stamp(payload: bytes) -> tuple[int, int, int]:
    return STAMP.unpack_from(payload)
