import math

import numpy as np
import pytest

from _gen import calibrated_params, random_scenario
from edgeloop.bounds import quantile_bounds
from edgeloop.dist import ComponentDist, DiscretePmf
from edgeloop.loop import Case, ClosedLoopModel, build_model, closed_loop_pmf
from edgeloop.oracle import McConfig, compare_cdf, sample_closed_loop
from edgeloop.radio import tx_time_model


def _point_model(t0):
    return ClosedLoopModel(Case.RAW_OFFLOAD, 1.0, 0.0, (ComponentDist.point(t0),), t0)


def test_point_mass_samples():
    x = sample_closed_loop(_point_model(0.042), McConfig(1000, seed=1))
    assert np.all(x == 0.042)
    c = compare_cdf(DiscretePmf(0.042, 1e-4, [1.0]), x)
    assert c.ks_distance == 0.0
    assert all(v == 0.0 for v in c.quantile_errors.values())


def test_reproducible_and_worker_split():
    m = build_model(calibrated_params(), Case.COMPRESS_AT_ROBOT, 1.2, 1e-3)
    a = sample_closed_loop(m, McConfig(20000, seed=9, n_workers=3))
    b = sample_closed_loop(m, McConfig(20000, seed=9, n_workers=3))
    assert np.array_equal(a, b) and a.size == 20000 and np.all(np.diff(a) >= 0)
    assert not np.array_equal(a, sample_closed_loop(m, McConfig(20000, seed=10, n_workers=3)))


def test_sample_mean_lln():
    m = build_model(calibrated_params(), Case.COMPRESS_AT_ROBOT, 1.3, 1e-3)
    n = 10**6
    x = sample_closed_loop(m, McConfig(n, seed=3))
    sd = math.sqrt(sum(c.var for c in m.components))
    assert abs(x.mean() - m.mean_s) < 5 * sd / math.sqrt(n)


def test_ks_null_distribution():
    rng = np.random.default_rng(0)
    mass = rng.random(50)
    p = DiscretePmf(0.01, 1e-3, mass)
    n = 200000
    # samples sit on the PMF support points
    x = p.grid[rng.choice(mass.size, n, p=p.mass)]
    assert compare_cdf(p, x).ks_distance <= 1.63 / math.sqrt(n)


def test_shift_shows_in_quantile_errors():
    m = build_model(calibrated_params(), Case.RAW_OFFLOAD, 1.0, 1e-3)
    dt = 1e-4
    p = closed_loop_pmf(m, dt)
    x = sample_closed_loop(m, McConfig(200000, seed=4))
    base = compare_cdf(p, x)
    moved = compare_cdf(p.shifted(10 * dt), x)
    for r in base.quantile_errors:
        assert moved.quantile_errors[r] - base.quantile_errors[r] == pytest.approx(10 * dt, abs=1e-12)


def test_negbin_vs_gaussian_modes_at_500_packets():
    tx = tx_time_model(500, 1e-2, 1e-3)
    comp = ComponentDist.gaussian(tx.mu_s, tx.sigma2_s2, "T_tx^c")
    m = ClosedLoopModel(Case.RAW_OFFLOAD, 1.0, 1e-2, (comp,), tx.mu_s, {"T_tx^c": tx})
    p = closed_loop_pmf(m, 1e-4)
    exact = compare_cdf(p, sample_closed_loop(m, McConfig(10**6, seed=5)))
    approx = compare_cdf(p, sample_closed_loop(m, McConfig(10**6, seed=5, tx_mode="gaussian_approx")))
    gap = exact.quantile_errors[0.999] - approx.quantile_errors[0.999]
    # skewness of the exact law puts its far tail a little further out
    assert 0 < abs(gap) < 5 * tx.sigma_s


def test_empirical_quantile_within_bounds():
    rng = np.random.default_rng(17)
    for i in range(50):
        s = random_scenario(rng)
        m = build_model(s, Case.COMPRESS_AT_ROBOT, float(rng.uniform(1, 1.5)), float(10 ** rng.uniform(-4, -2)))
        x = sample_closed_loop(m, McConfig(20000, seed=i))
        b = quantile_bounds(m, 0.95)
        q = x[math.ceil(0.95 * x.size) - 1]
        assert b.tau_lower_s * (1 - 1e-2) <= q <= b.tau_upper_s * (1 + 1e-2)


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(0)
    with pytest.raises(ValueError):
        McConfig(10, tx_mode="poisson")
    with pytest.raises(ValueError):
        compare_cdf(DiscretePmf(0, 1, [1.0]), [])
