"""Per-flow statistics: rate, loss and RFC 3550 interarrival jitter."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field


def compute_jitter(latencies) -> float | None:
    """RFC 3550 interarrival jitter over one-way transit times (ms).

    ``latencies`` must be in arrival order. Each step moves the estimate
    1/16 of the way toward the absolute transit-time difference between
    consecutive packets. Returns None for fewer than two samples.
    """
    if len(latencies) < 2:
        return None
    j = 0.0
    prev = latencies[0]
    for t in latencies[1:]:
        j += (abs(t - prev) - j) / 16.0
        prev = t
    return j


@dataclass
class FlowStats:
    flow_id: str
    src: str = ""
    dst: str = ""
    sent_packets: int = 0
    received_packets: int = 0
    sent_octets: int = 0
    received_octets: int = 0
    duplicates: int = 0
    reordered: int = 0
    # one-way latencies in ms, arrival order
    latencies: list = field(default_factory=list)
    # active sending interval, µs
    start_us: int = 0
    stop_us: int = 0

    @property
    def jitter_ms(self) -> float | None:
        return compute_jitter(self.latencies)

    @property
    def loss_pct(self) -> float:
        if self.sent_packets == 0:
            return 0.0
        return 100.0 * (self.sent_packets - self.received_packets) / self.sent_packets

    @property
    def duration_s(self) -> float:
        return max(self.stop_us - self.start_us, 0) / 1e6

    @property
    def rate_bps(self) -> float:
        """Receiver-side goodput over the sending interval."""
        d = self.duration_s
        return self.received_octets * 8 / d if d > 0 else 0.0

    @property
    def sent_rate_bps(self) -> float:
        d = self.duration_s
        return self.sent_octets * 8 / d if d > 0 else 0.0

    @property
    def mean_latency_ms(self) -> float | None:
        return statistics.fmean(self.latencies) if self.latencies else None


def mean_ci95(values) -> tuple[float, float | None]:
    """Mean and Student-t 95 % confidence half-width (None for n < 2)."""
    values = [v for v in values if v is not None and not math.isnan(v)]
    if not values:
        return math.nan, None
    m = statistics.fmean(values)
    if len(values) < 2:
        return m, None
    from scipy.stats import t

    half = t.ppf(0.975, len(values) - 1) * statistics.stdev(values) / math.sqrt(len(values))
    return m, float(half)
