import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edgeloop.compute import (
    CompressionParams,
    ServerParams,
    compression_cycles,
    compression_time_dist,
    computation_time_dist,
    decompression_time_dist,
)


def test_compression_cycles_values():
    assert compression_cycles(1.0, 3.5) == 0.0
    assert compression_cycles(1.2, 3.5) == pytest.approx(float(mp.e**4.2 - mp.e**3.5), rel=1e-14)
    assert compression_cycles(1.2, 3.5) == pytest.approx(33.5708, abs=1e-4)
    with pytest.raises(ValueError):
        compression_cycles(0.99, 3.5)


@settings(max_examples=200, deadline=None)
@given(q1=st.floats(1.0, 3.0), q2=st.floats(1.0, 3.0), psi=st.floats(0.5, 5.0))
def test_compression_cycles_increasing(q1, q2, psi):
    lo, hi = sorted((q1, q2))
    if hi - lo > 1e-12:
        assert compression_cycles(hi, psi) > compression_cycles(lo, psi) >= 0.0


def test_computation_time():
    bs = ServerParams(1.25, 15e9, 100.0)
    g = computation_time_dist(bs, 0.15e6)
    assert g.mean == pytest.approx(1.25e-3, rel=1e-14)
    assert g.shape == 1.25
    assert computation_time_dist(bs, 0.0).is_point_mass
    g2 = computation_time_dist(ServerParams(1.25, 30e9, 100.0), 0.15e6)
    assert g2.scale == pytest.approx(g.scale / 2, rel=1e-15)
    assert g2.mean == pytest.approx(g.mean / 2, rel=1e-15)


def test_compression_time():
    robot = ServerParams(1.5, 1e9)
    cp = CompressionParams(psi=3.5, zeta=0.1, q=1.2)
    assert compression_time_dist(robot, 0.5e6, cp).mean == pytest.approx(16.785e-3, rel=1e-4)
    assert compression_time_dist(robot, 0.5e6, CompressionParams(3.5, 0.1, 1.0)).is_point_mass
    other = compression_time_dist(ServerParams(4.0, 1e9), 0.5e6, cp)
    assert other.mean == pytest.approx(compression_time_dist(robot, 0.5e6, cp).mean, rel=1e-14)


def test_decompression_time():
    bs = ServerParams(1.25, 15e9)
    cp = CompressionParams(psi=3.5, zeta=0.1, q=1.2)
    assert decompression_time_dist(bs, 0.5e6 / 1.2, cp).mean == pytest.approx(9.325e-5, rel=1e-3)
    assert decompression_time_dist(bs, 0.5e6, CompressionParams(3.5, 0.1, 1.0)).is_point_mass


@settings(max_examples=200, deadline=None)
@given(q=st.floats(1.0, 3.0), psi=st.floats(0.5, 5.0), zeta=st.floats(0.01, 0.99),
       kr=st.floats(0.2, 5.0), kb=st.floats(0.2, 5.0), fr=st.floats(1e8, 1e10), fb=st.floats(1e9, 5e10))
def test_cycle_relations(q, psi, zeta, kr, kb, fr, fb):
    cp = CompressionParams(psi, zeta, q)
    c = compression_cycles(q, psi)
    d_bits = 1e5
    cpd = compression_time_dist(ServerParams(kr, fr), d_bits, cp)
    dd = decompression_time_dist(ServerParams(kb, fb), d_bits, cp)
    # per-bit cycle expectations: compression C(Q), decompression zeta C(Q)
    assert cpd.shape * cpd.scale * fr / d_bits == pytest.approx(c, rel=1e-12, abs=1e-300)
    assert dd.shape * dd.scale * fb / d_bits == pytest.approx(zeta * c, rel=1e-12, abs=1e-300)
    assert cpd.mean == cpd.shape * cpd.scale
    if zeta * fr / (q * fb) < 1 and c > 0:
        assert decompression_time_dist(ServerParams(kb, fb), d_bits / q, cp).mean < cpd.mean


def test_gamma_sampler_moments():
    rng = np.random.default_rng(11)
    g = compression_time_dist(ServerParams(1.5, 5e9), 0.5e6, CompressionParams(3.5, 0.1, 1.3))
    x = g.scale * rng.standard_gamma(g.shape, 10**6)
    assert abs(x.mean() - g.mean) < 5 * math.sqrt(g.var / 1e6)
    # Var of sample variance for a Gamma: (mu4 - sigma^4)/n with mu4 = 3 sigma^4 (1 + 2/k)
    mu4 = 3 * g.var**2 * (1 + 2 / g.shape)
    assert abs(x.var() - g.var) < 5 * math.sqrt((mu4 - g.var**2) / 1e6)


def test_parameter_validation():
    with pytest.raises(ValueError):
        ServerParams(0.0, 1e9)
    with pytest.raises(ValueError):
        CompressionParams(3.5, 1.0)
    with pytest.raises(ValueError):
        CompressionParams(3.5, 0.1, q=0.5)
