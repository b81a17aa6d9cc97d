import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _gen import calibrated_params, reference_params, random_scenario
from edgeloop.bounds import quantile_bounds
from edgeloop.compute import compression_cycles
from edgeloop.dist import ComponentDist, pmf_quantile, total_variation
from edgeloop.loop import (
    COMPRESS,
    COMPUTE_CMD,
    COMPUTE_FB,
    DECOMPRESS,
    TX_CMD,
    TX_FB,
    Case,
    ClosedLoopModel,
    analytic_mean,
    build_case1,
    build_case2,
    build_model,
    closed_loop_pmf,
)
from edgeloop.radio import packet_count, packet_time


def test_component_layout():
    s = reference_params()
    m1 = build_case1(s, 1.2, 1e-3)
    m2 = build_case2(s, 1e-3)
    assert m1.labels == (TX_CMD, TX_FB, COMPRESS, COMPUTE_CMD, DECOMPRESS, COMPUTE_FB)
    assert m2.labels == (TX_CMD, TX_FB, COMPUTE_CMD, COMPUTE_FB)


def _mean_by_hand(s, case, q, eps):
    # written out again from the component laws, independently of analytic_mean
    n_c = packet_count(s.command_bits, s.link_ho.packet_bits)
    tp_h, tp_r = packet_time(s.link_ho, eps), packet_time(s.link_robot, eps)
    bs = s.bs_server
    comp = (s.command_bits + s.sensing_bits) * bs.shape * bs.comp_scale / bs.freq_hz
    if case is Case.RAW_OFFLOAD:
        n_f = packet_count(s.sensing_bits, s.link_robot.packet_bits)
        return (n_c * tp_h + n_f * tp_r) / (1 - eps) + comp
    n_f = packet_count(s.sensing_bits / q, s.link_robot.packet_bits)
    c = compression_cycles(q, s.comp.psi)
    return ((n_c * tp_h + n_f * tp_r) / (1 - eps) + comp + s.sensing_bits * c / s.robot_server.freq_hz
            + s.comp.zeta * (s.sensing_bits / q) * c / bs.freq_hz)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), q=st.floats(1.0, 3.0), le=st.floats(-4, -2))
def test_means_term_by_term(seed, q, le):
    s = random_scenario(np.random.default_rng(seed))
    eps = 10.0**le
    for case in Case:
        m = build_model(s, case, q, eps)
        assert m.mean_s == pytest.approx(sum(c.mean for c in m.components), rel=1e-14)
        assert m.mean_s == pytest.approx(analytic_mean(s, case, q, eps), rel=1e-12)
        assert m.mean_s == pytest.approx(_mean_by_hand(s, case, q, eps), rel=1e-12)
    diff = build_case2(s, eps).mean_s - build_case1(s, 1.0, eps).mean_s
    assert abs(diff) <= 1e-15 * build_case2(s, eps).mean_s


def test_q_one_reduces_to_raw_offload():
    s = reference_params()
    m1 = build_case1(s, 1.0, 1e-3)
    assert m1.component(COMPRESS).is_point and m1.component(COMPRESS).a == 0.0
    assert m1.component(DECOMPRESS).is_point
    live = tuple(c for c in m1.components if not c.is_point)
    assert live == build_case2(s, 1e-3).components


def test_compression_trade_off_signs():
    s = dataclasses.replace(reference_params(), nf_counts_compressed=True)
    qs = np.arange(1.0, 1.6, 0.1)
    tx = [build_case1(s, q, 1e-3).component(TX_FB).mean for q in qs]
    cp = [build_case1(s, q, 1e-3).component(COMPRESS).mean for q in qs]
    assert np.all(np.diff(tx) < 0) and np.all(np.diff(cp) > 0)


def test_uncompressed_uplink_reading():
    s = dataclasses.replace(reference_params(), nf_counts_compressed=False)
    a = build_case1(s, 1.0, 1e-3).component(TX_FB)
    b = build_case1(s, 1.4, 1e-3).component(TX_FB)
    assert a == b


def test_symmetric_hops_identical():
    s = reference_params()
    s = dataclasses.replace(s, sensing_bits=s.command_bits, link_robot=s.link_ho)
    m = build_case2(s, 1e-3)
    assert m.component(TX_CMD).a == m.component(TX_FB).a and m.component(TX_CMD).b == m.component(TX_FB).b


def test_low_level_packets_add_two_hops():
    s = dataclasses.replace(reference_params(), low_level_packets=(2, 3))
    m = build_case1(s, 1.2, 1e-3)
    assert len(m.components) == 8
    assert m.mean_s == pytest.approx(analytic_mean(s, Case.COMPRESS_AT_ROBOT, 1.2, 1e-3), rel=1e-12)


def test_point_mass_model_pmf():
    m = ClosedLoopModel(Case.RAW_OFFLOAD, 1.0, 0.0,
                        (ComponentDist.point(0.004), ComponentDist.point(0.011)), 0.015)
    p = closed_loop_pmf(m, 1e-3)
    assert p.mass.tolist() == [1.0] and p.origin_s == pytest.approx(0.015)


def test_pmf_mean_close_to_analytic():
    for s in (reference_params(), calibrated_params()):
        m = build_case1(s, 1.2, 1e-3)
        assert abs(closed_loop_pmf(m, 1e-3).mean - m.mean_s) <= 2e-3


def test_pmf_quantile_inside_bounds_random():
    rng = np.random.default_rng(5)
    for _ in range(100):
        s = random_scenario(rng)
        m = build_case1(s, float(rng.uniform(1, 1.5)), float(10 ** rng.uniform(-4, -2)))
        p = closed_loop_pmf(m, 1e-3)
        b = quantile_bounds(m, 0.95)
        tau = pmf_quantile(p, 0.95)
        assert b.tau_lower_s - 1e-3 <= tau <= b.tau_upper_s + 1e-3
        for rho in (0.5, 0.9, 0.99):
            assert pmf_quantile(p, rho) >= max(c.quantile(rho) for c in m.components) - 1e-3


def test_case1_q1_matches_case2_tv():
    rng = np.random.default_rng(8)
    for _ in range(5):
        s = random_scenario(rng)
        eps = float(10 ** rng.uniform(-4, -2))
        assert total_variation(closed_loop_pmf(build_case1(s, 1.0, eps)),
                               closed_loop_pmf(build_case2(s, eps))) <= 1e-9


def test_case_parse_aliases():
    assert Case.parse("1") is Case.COMPRESS_AT_ROBOT
    assert Case.parse("raw_offload") is Case.RAW_OFFLOAD
    with pytest.raises(ValueError):
        Case.parse("3")
