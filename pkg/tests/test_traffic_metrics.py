import math

import pytest
from hypothesis import given, strategies as st

from ipndn.simnet import FlowStats, compute_jitter, gen_burst, gen_cbr, mean_ci95
from ipndn.simnet.traffic import read_stamp, stamp_payload


def test_cbr_count_and_spacing():
    f = gen_cbr("f", "a", "b", 1472, rate_pps=100, start_ms=0, stop_ms=1000)
    times = list(f.send_times())
    assert len(times) == 100
    assert times[:3] == [0, 10_000, 20_000]
    assert f.total_length == 1492


def test_cbr_offset_and_horizon():
    f = gen_cbr("f", "a", "b", 100, rate_pps=1000, start_ms=10, stop_ms=20)
    assert list(f.send_times(offset_us=500)) == [10_500 + 1000 * k for k in range(10)]
    assert len(list(f.send_times(horizon_us=15_000))) == 5


def test_burst_times():
    f = gen_burst("f", "a", "b", burst=5, size=1000, gap_ms=10, stop_ms=30)
    assert list(f.send_times()) == [0] * 5 + [10_000] * 5 + [20_000] * 5


def test_flow_validation():
    with pytest.raises(ValueError):
        gen_cbr("f", "a", "b", 8, rate_pps=1, start_ms=0, stop_ms=1)
    with pytest.raises(ValueError):
        gen_cbr("f", "a", "b", 100, rate_pps=0, start_ms=0, stop_ms=1)


def test_stamp_round_trip():
    p = stamp_payload(3, 77, 123_456_789, 100)
    assert len(p) == 100
    assert read_stamp(p) == (3, 77, 123_456_789)


def test_jitter_constant_transit_is_zero():
    assert compute_jitter([5.0] * 50) == 0.0
    assert compute_jitter([1.0]) is None


@pytest.mark.parametrize("n", [2, 3, 10, 100])
def test_jitter_alternating_closed_form(n):
    # |D| = 10 at every step, so J_k = 10 * (1 - (15/16)^k) after k steps
    lat = [10.0 if i % 2 == 0 else 20.0 for i in range(n)]
    assert compute_jitter(lat) == pytest.approx(10 * (1 - (15 / 16) ** (n - 1)))


@given(st.lists(st.floats(0, 1000), min_size=2, max_size=50), st.floats(-100, 100))
def test_jitter_shift_invariant(lat, shift):
    assert compute_jitter([x + shift for x in lat]) == pytest.approx(compute_jitter(lat), abs=1e-6)


def test_flow_stats():
    s = FlowStats("f", sent_packets=100, received_packets=93, received_octets=93 * 1492,
                  start_us=0, stop_us=2_000_000)
    assert s.loss_pct == pytest.approx(7.0)
    assert s.rate_bps == pytest.approx(93 * 1492 * 8 / 2)
    assert FlowStats("g").loss_pct == 0.0 and FlowStats("g").rate_bps == 0.0


def test_ci_student_t():
    mean, half = mean_ci95([1.0] * 5 + [3.0] * 5)
    # t(0.975, 9) = 2.2621571628; sample stdev = sqrt(10/9)
    assert mean == 2.0
    assert half == pytest.approx(2.2621571628 * math.sqrt(10 / 9) / math.sqrt(10), rel=1e-9)


def test_ci_single_value():
    assert mean_ci95([4.0]) == (4.0, None)
    m, h = mean_ci95([])
    assert math.isnan(m) and h is None
