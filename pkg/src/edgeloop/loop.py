"""Closed-loop latency of the operator -> edge -> robot -> edge -> operator loop.

Two designs are modelled.  ``compress_at_robot`` compresses the sensing data
on the robot before the uplink and decompresses it at the edge server;
``raw_offload`` ships the raw data.  Each model is an ordered list of
independent components whose sum is the loop latency.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .compute import (
    CompressionParams,
    ServerParams,
    compression_cycles,
    compression_time_dist,
    computation_time_dist,
    decompression_time_dist,
)
from .dist import (
    DEFAULT_STEP_S,
    DEFAULT_TAIL,
    ComponentDist,
    DiscretePmf,
    convolve_all,
    discretize,
)
from .radio import LinkParams, TxTimeModel, packet_count, packet_time, tx_time_model

__all__ = [
    "Case",
    "ScenarioParams",
    "ClosedLoopModel",
    "build_case1",
    "build_case2",
    "build_model",
    "closed_loop_pmf",
    "analytic_mean",
    "TX_CMD",
    "TX_FB",
    "COMPRESS",
    "COMPUTE_CMD",
    "DECOMPRESS",
    "COMPUTE_FB",
]

TX_CMD = "T_tx^c"
TX_FB = "T_tx^f"
COMPRESS = "T_cp^f"
COMPUTE_CMD = "T_c^c"
DECOMPRESS = "T_d^f"
COMPUTE_FB = "T_c^f"
TX_LOW_CMD = "T_tx^pc"
TX_LOW_FB = "T_tx^pf"


class Case(str, enum.Enum):
    COMPRESS_AT_ROBOT = "compress_at_robot"
    RAW_OFFLOAD = "raw_offload"

    @classmethod
    def parse(cls, value: "Case | str | int") -> "Case":
        if isinstance(value, cls):
            return value
        aliases = {"1": cls.COMPRESS_AT_ROBOT, "case1": cls.COMPRESS_AT_ROBOT,
                   "2": cls.RAW_OFFLOAD, "case2": cls.RAW_OFFLOAD}
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class ScenarioParams:
    """Physical and system constants of one teleoperation deployment.

    ``link_ho`` carries operator <-> edge traffic, ``link_robot`` robot <->
    edge traffic.  ``low_level_packets`` re-includes the low-level command
    hops as ``(N_c^p, N_f^p)`` packets; ``None`` leaves them out.
    """

    command_bits: float
    sensing_bits: float
    link_ho: LinkParams
    link_robot: LinkParams
    bs_server: ServerParams
    robot_server: ServerParams
    comp: CompressionParams
    nf_counts_compressed: bool = True
    low_level_packets: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if not (self.command_bits > 0 and self.sensing_bits > 0):
            raise ValueError("command_bits and sensing_bits must be > 0")

    def with_robot_freq(self, freq_hz: float) -> "ScenarioParams":
        return replace(self, robot_server=replace(self.robot_server, freq_hz=freq_hz))


@dataclass(frozen=True)
class ClosedLoopModel:
    case: Case
    q: float
    epsilon: float
    components: tuple[ComponentDist, ...]
    mean_s: float
    tx_models: dict[str, TxTimeModel] = field(default_factory=dict, compare=False)

    def component(self, label: str) -> ComponentDist:
        for c in self.components:
            if c.label == label:
                return c
        raise KeyError(label)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.components)


def _tx_component(
    link: LinkParams, bits: float, epsilon: float, label: str, tx_models: dict
) -> ComponentDist:
    return _tx_packets(link, packet_count(bits, link.packet_bits), epsilon, label, tx_models)


def _tx_packets(link: LinkParams, n: int, epsilon: float, label: str, tx_models: dict):
    model = tx_time_model(n, epsilon, packet_time(link, epsilon))
    tx_models[label] = model
    return ComponentDist.gaussian(model.mu_s, model.sigma2_s2, label)


def _gamma(g, label: str) -> ComponentDist:
    return ComponentDist.gamma(g.shape, g.scale, label)


def _finish(case, q, epsilon, comps, tx_models) -> ClosedLoopModel:
    comps = tuple(comps)
    return ClosedLoopModel(case, q, epsilon, comps, sum(c.mean for c in comps), tx_models)


def _low_level(s: ScenarioParams, epsilon: float, tx_models: dict) -> list[ComponentDist]:
    if s.low_level_packets is None:
        return []
    n_pc, n_pf = s.low_level_packets
    return [
        _tx_packets(s.link_robot, n_pc, epsilon, TX_LOW_CMD, tx_models),
        _tx_packets(s.link_ho, n_pf, epsilon, TX_LOW_FB, tx_models),
    ]


def build_case1(s: ScenarioParams, q: float, epsilon: float) -> ClosedLoopModel:
    """Compress at the robot with ratio ``q``, outage ``epsilon`` on both hops."""
    cp = replace(s.comp, q=q)
    uplink_bits = s.sensing_bits / q if s.nf_counts_compressed else s.sensing_bits
    tx: dict[str, TxTimeModel] = {}
    comps = [
        _tx_component(s.link_ho, s.command_bits, epsilon, TX_CMD, tx),
        _tx_component(s.link_robot, uplink_bits, epsilon, TX_FB, tx),
        _gamma(compression_time_dist(s.robot_server, s.sensing_bits, cp), COMPRESS),
        _gamma(computation_time_dist(s.bs_server, s.command_bits), COMPUTE_CMD),
        _gamma(decompression_time_dist(s.bs_server, s.sensing_bits / q, cp), DECOMPRESS),
        _gamma(computation_time_dist(s.bs_server, s.sensing_bits), COMPUTE_FB),
    ]
    comps += _low_level(s, epsilon, tx)
    return _finish(Case.COMPRESS_AT_ROBOT, q, epsilon, comps, tx)


def build_case2(s: ScenarioParams, epsilon: float) -> ClosedLoopModel:
    """Raw sensing data offloaded to the edge server."""
    tx: dict[str, TxTimeModel] = {}
    comps = [
        _tx_component(s.link_ho, s.command_bits, epsilon, TX_CMD, tx),
        _tx_component(s.link_robot, s.sensing_bits, epsilon, TX_FB, tx),
        _gamma(computation_time_dist(s.bs_server, s.command_bits), COMPUTE_CMD),
        _gamma(computation_time_dist(s.bs_server, s.sensing_bits), COMPUTE_FB),
    ]
    comps += _low_level(s, epsilon, tx)
    return _finish(Case.RAW_OFFLOAD, 1.0, epsilon, comps, tx)


def build_model(s: ScenarioParams, case: Case | str, q: float, epsilon: float) -> ClosedLoopModel:
    case = Case.parse(case)
    if case is Case.RAW_OFFLOAD:
        return build_case2(s, epsilon)
    return build_case1(s, q, epsilon)


def analytic_mean(s: ScenarioParams, case: Case | str, q: float, epsilon: float) -> float:
    """Closed-form mean latency, written out term by term."""
    case = Case.parse(case)
    kbs, fbs, beta = s.bs_server.shape, s.bs_server.freq_hz, s.bs_server.comp_scale
    n_c = packet_count(s.command_bits, s.link_ho.packet_bits)
    tp_ho = packet_time(s.link_ho, epsilon)
    tp_r = packet_time(s.link_robot, epsilon)
    mean = n_c * tp_ho / (1 - epsilon) + s.command_bits * kbs * beta / fbs
    mean += s.sensing_bits * kbs * beta / fbs
    if case is Case.RAW_OFFLOAD:
        m_f = packet_count(s.sensing_bits, s.link_robot.packet_bits)
        mean += m_f * tp_r / (1 - epsilon)
    else:
        uplink = s.sensing_bits / q if s.nf_counts_compressed else s.sensing_bits
        n_f = packet_count(uplink, s.link_robot.packet_bits)
        cq = compression_cycles(q, s.comp.psi)
        mean += n_f * tp_r / (1 - epsilon)
        mean += s.sensing_bits * cq / s.robot_server.freq_hz
        mean += s.comp.zeta * s.sensing_bits * cq / (q * fbs)
    if s.low_level_packets is not None:
        n_pc, n_pf = s.low_level_packets
        mean += n_pc * tp_r / (1 - epsilon) + n_pf * tp_ho / (1 - epsilon)
    return mean


def closed_loop_pmf(
    m: ClosedLoopModel, step_s: float = DEFAULT_STEP_S, tail: float = DEFAULT_TAIL
) -> DiscretePmf:
    """Discretize every component and convolve them into the loop-latency PMF."""
    return convolve_all(discretize(c, step_s, tail) for c in m.components)
