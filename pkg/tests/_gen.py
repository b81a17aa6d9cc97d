"""Random scenario draws shared by the test modules."""


from edgeloop.compute import CompressionParams, ServerParams
from edgeloop.loop import ScenarioParams
from edgeloop.radio import LinkParams
from edgeloop.scenario import CALIBRATED_SCENARIO, REFERENCE_SCENARIO, load_scenario


def reference_params():
    return load_scenario(REFERENCE_SCENARIO).to_params()


def calibrated_params():
    return load_scenario(CALIBRATED_SCENARIO).to_params()


def random_link(rng) -> LinkParams:
    # gamma0 between roughly 10 and 2000 at B = 1e7 Hz
    return LinkParams(
        tx_power_watts=float(rng.uniform(0.2, 1.0)),
        distance_m=float(rng.uniform(500.0, 3000.0)),
        bandwidth_hz=1e7,
        friss_k0=10 ** (float(rng.uniform(-15.0, -11.0)) / 10),
        path_loss_exp=2.0,
        noise_n0=10 ** (float(rng.uniform(-114.0, -106.0)) / 10) / 1e7,
        packet_bits=int(rng.choice([4000, 8000, 12000])),
    )


def random_scenario(rng) -> ScenarioParams:
    """A deployment in the neighbourhood of the reference one."""
    return ScenarioParams(
        command_bits=float(rng.uniform(0.1e6, 0.3e6)),
        sensing_bits=float(rng.uniform(0.3e6, 1.0e6)),
        link_ho=random_link(rng),
        link_robot=random_link(rng),
        bs_server=ServerParams(float(rng.uniform(1.0, 2.0)), float(rng.uniform(5e9, 20e9)),
                               float(rng.uniform(100.0, 800.0))),
        robot_server=ServerParams(float(rng.uniform(1.0, 2.0)), float(rng.uniform(1e9, 10e9))),
        comp=CompressionParams(psi=float(rng.uniform(2.5, 4.0)), zeta=float(rng.uniform(0.05, 0.3))),
    )
