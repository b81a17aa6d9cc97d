import pytest
from hypothesis import given, settings, strategies as st

from edgeloop.radio import avg_snr
from edgeloop.scenario import (
    CALIBRATED_SCENARIO,
    REFERENCE_SCENARIO,
    SEED_ENV_VAR,
    ScenarioError,
    load_scenario,
    parse_scenario,
)

BASE = REFERENCE_SCENARIO.read_text()


def test_bundled_scenarios_load():
    s = load_scenario(REFERENCE_SCENARIO).to_params()
    assert s.command_bits == 0.15e6 and s.sensing_bits == 0.5e6
    assert s.link_ho.path_loss_exp == 2.0
    assert avg_snr(s.link_ho) == pytest.approx(10 ** (-2.7) * 0.5 / (4e6 * 1e-11), rel=1e-12)
    c = load_scenario(CALIBRATED_SCENARIO)
    assert "Derived by" in c.comments[0]


def test_round_trip_identity():
    for path in (REFERENCE_SCENARIO, CALIBRATED_SCENARIO):
        a = load_scenario(path)
        b = parse_scenario(a.dumps())
        assert a == b and b.dumps() == a.dumps()


@settings(max_examples=100, deadline=None)
@given(p=st.floats(1e-3, 100.0), d=st.floats(1.0, 1e5), k0=st.floats(-60.0, 0.0),
       seed=st.integers(0, 2**63 - 1), n=st.integers(1, 10**7))
def test_round_trip_random_values(p, d, k0, seed, n):
    sf = (parse_scenario(BASE).with_value("link_ho", "tx_power_watts", p)
          .with_value("link_robot", "distance_m", d).with_value("link_ho", "friss_k0_db", k0)
          .with_value("numerics", "seed", seed).with_value("numerics", "n_samples", n))
    assert parse_scenario(sf.dumps()) == sf


@pytest.mark.parametrize("edit,msg", [
    (lambda t: t.replace("[data]", "[data]\nbogus = 1"), "unknown key"),
    (lambda t: t + "\n[extra]\nx = 1\n", "unknown section"),
    (lambda t: t.replace("command_bits = 150000.0\n", ""), "missing key"),
    (lambda t: t.replace("friss_k0_db = -27.0", "friss_k0_db = -27.0\nfriss_k0 = 0.002", 1), "exactly one"),
    (lambda t: t.replace("distance_m = 2000.0", "distance_m = -5", 1), "positive"),
    (lambda t: t.replace("packet_bits = 12000", "packet_bits = 12.5", 1), "integer"),
    (lambda t: t.replace("zeta = 0.1", "zeta = 1.5"), "zeta"),
    (lambda t: t.replace("tx_mode = exact_negbin", "tx_mode = magic"), "tx_mode"),
    (lambda t: t.replace("noise_is_total_power = true", "noise_is_total_power = maybe", 1), "boolean"),
])
def test_config_errors(edit, msg):
    with pytest.raises(ScenarioError, match=msg):
        parse_scenario(edit(BASE))


def test_unit_variants_agree():
    a = parse_scenario(BASE).to_params().link_ho
    dbm = BASE.replace("noise_n0_db = -110.0", "noise_n0_dbm = -80.0", 1)
    b = parse_scenario(dbm).to_params().link_ho
    assert b.noise_n0 == pytest.approx(a.noise_n0, rel=1e-12)
    psd = BASE.replace("noise_n0_db = -110.0\nnoise_is_total_power = true", "noise_n0 = 1e-18", 1)
    assert parse_scenario(psd).to_params().link_ho.noise_n0 == pytest.approx(a.noise_n0, rel=1e-12)


def test_seed_env_override(monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "77")
    assert parse_scenario(BASE).numerics.seed == 77


def test_low_level_packets_parse():
    sf = parse_scenario(BASE.replace("low_level_packets = none", "low_level_packets = 2,3"))
    assert sf.to_params().low_level_packets == (2, 3)


def test_missing_file():
    with pytest.raises(ScenarioError):
        load_scenario("/nonexistent/x.cfg")
