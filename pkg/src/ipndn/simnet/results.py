"""CSV output (RFC 4180) for simulation runs and comparisons."""

from __future__ import annotations

import csv
import io
import math

from .engine import SimResult

FLOW_COLUMNS = [
    "mode",
    "seed",
    "flow_id",
    "src",
    "dst",
    "sent_packets",
    "received_packets",
    "sent_octets",
    "received_octets",
    "duplicates",
    "reordered",
    "sent_rate_bps",
    "rate_bps",
    "mean_latency_ms",
    "jitter_ms",
    "loss_pct",
]

NODE_COLUMNS = [
    "mode",
    "seed",
    "node_id",
    "role",
    "interests_in",
    "interests_out",
    "data_in",
    "data_out",
    "cs_hits",
    "aggregated",
    "duplicate_nonce",
    "no_route",
    "unsolicited",
    "pit_expired",
    "captured",
    "tunneled",
    "unroutable",
    "local",
    "oversized",
    "overflow",
    "expired_datagrams",
    "expired_macros",
    "requests_sent",
    "datagram_interests_sent",
    "data_sent",
    "datagrams_sent",
    "ndn_originated",
    "parse_errors",
    "misses",
    "corruption",
    "injected",
    "tx_packets",
    "tx_octets",
    "queue_drops",
    "loss_drops",
]

RUN_COLUMNS = [
    "mode",
    "seed",
    "rate_bps",
    "jitter_ms",
    "loss_pct",
    "captured",
    "delivered",
    "gateway_ndn_packets",
    "overhead_ratio",
]


def fmt(value) -> str:
    """Fixed formatting so CSV bytes depend only on the values."""
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.6f}"
    return str(value)


def _write(rows, columns, fh) -> None:
    w = csv.writer(fh, lineterminator="\r\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])


def flow_rows(result: SimResult) -> list[dict]:
    rows = []
    for st in result.flows.values():
        rows.append(
            {
                "mode": result.mode.value,
                "seed": result.seed,
                "flow_id": st.flow_id,
                "src": st.src,
                "dst": st.dst,
                "sent_packets": st.sent_packets,
                "received_packets": st.received_packets,
                "sent_octets": st.sent_octets,
                "received_octets": st.received_octets,
                "duplicates": st.duplicates,
                "reordered": st.reordered,
                "sent_rate_bps": st.sent_rate_bps,
                "rate_bps": st.rate_bps,
                "mean_latency_ms": st.mean_latency_ms,
                "jitter_ms": st.jitter_ms,
                "loss_pct": st.loss_pct,
            }
        )
    return rows


def node_rows(result: SimResult) -> list[dict]:
    return [
        {"mode": result.mode.value, "seed": result.seed, "node_id": nid, **counters}
        for nid, counters in result.nodes.items()
    ]


def run_summary(result: SimResult) -> dict:
    """Per-run aggregates: flow metrics averaged over flows, plus NDN overhead."""
    flows = list(result.flows.values())
    jitters = [f.jitter_ms for f in flows if f.jitter_ms is not None]
    delivered = result.delivered
    ndn = result.gateway_ndn_originated
    return {
        "mode": result.mode.value,
        "seed": result.seed,
        "rate_bps": sum(f.rate_bps for f in flows) / len(flows) if flows else math.nan,
        "jitter_ms": sum(jitters) / len(jitters) if jitters else math.nan,
        "loss_pct": sum(f.loss_pct for f in flows) / len(flows) if flows else math.nan,
        "captured": result.captured,
        "delivered": delivered,
        "gateway_ndn_packets": ndn,
        "overhead_ratio": ndn / delivered if delivered else math.nan,
    }


def write_csv(path, rows, columns) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write(rows, columns, fh)


def to_csv_text(rows, columns) -> str:
    buf = io.StringIO()
    _write(rows, columns, buf)
    return buf.getvalue()
