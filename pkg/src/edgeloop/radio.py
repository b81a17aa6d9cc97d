"""Link budget and block transmission time under an epsilon-outage rate.

A transmitter picks its rate so the instantaneous Rayleigh-faded SNR drops
below threshold with probability ``epsilon``; lost packets are resent until
they get through, so the time for an ``N``-packet block is negative
binomial in units of the per-packet airtime.  For large ``N`` that law is
replaced by a Gaussian with matching mean and variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

__all__ = [
    "LinkParams",
    "TxTimeModel",
    "LeftTailViolation",
    "avg_snr",
    "snr_threshold",
    "spectral_efficiency",
    "rate",
    "packet_time",
    "tx_time_model",
    "tx_time_negbin_pmf",
    "packet_count",
    "db_to_linear",
    "linear_to_db",
]

DEFAULT_PACKET_BITS = 12000


class LeftTailViolation(ValueError):
    """The Gaussian transmission-time model puts visible mass below zero."""


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class LinkParams:
    """One wireless hop.  ``friss_k0`` and ``noise_n0`` are linear (W/Hz for N0).

    ``fixed_packet_time`` overrides the rate-derived per-packet airtime when set.
    """

    tx_power_watts: float
    distance_m: float
    bandwidth_hz: float
    friss_k0: float
    path_loss_exp: float = 2.0
    noise_n0: float = 1e-11
    packet_bits: int = DEFAULT_PACKET_BITS
    fixed_packet_time: float | None = None

    def __post_init__(self) -> None:
        for name in ("tx_power_watts", "distance_m", "bandwidth_hz", "friss_k0", "noise_n0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if not self.path_loss_exp >= 1:
            raise ValueError(f"path_loss_exp must be >= 1, got {self.path_loss_exp!r}")
        if int(self.packet_bits) != self.packet_bits or self.packet_bits <= 0:
            raise ValueError(f"packet_bits must be a positive integer, got {self.packet_bits!r}")
        if self.fixed_packet_time is not None and not self.fixed_packet_time > 0:
            raise ValueError("fixed_packet_time must be > 0 when given")


@dataclass(frozen=True)
class TxTimeModel:
    """Gaussian approximation of the block transmission time (seconds).

    ``sigma2_s2 == 0`` marks the retransmission-free point mass at ``mu_s``.
    """

    n_packets: int
    epsilon: float
    t_packet_s: float
    mu_s: float
    sigma2_s2: float

    @property
    def sigma_s(self) -> float:
        return math.sqrt(self.sigma2_s2)

    @property
    def is_point_mass(self) -> bool:
        return self.sigma2_s2 == 0.0


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")


def avg_snr(link: LinkParams) -> float:
    """Mean received SNR ``K0 P / (d^l N0 B)``."""
    return link.friss_k0 * link.tx_power_watts / (
        link.distance_m**link.path_loss_exp * link.noise_n0 * link.bandwidth_hz
    )


def snr_threshold(gamma0: float, epsilon: float) -> float:
    """SNR threshold whose Rayleigh outage probability equals ``epsilon``."""
    _check_epsilon(epsilon)
    if not gamma0 > 0:
        raise ValueError("gamma0 must be > 0")
    # -log1p(-eps) keeps precision for tiny epsilon
    return gamma0 * -math.log1p(-epsilon)


def spectral_efficiency(link: LinkParams, epsilon: float) -> float:
    """``log2(1 + gamma_th)`` in bit/s/Hz."""
    return math.log2(1.0 + snr_threshold(avg_snr(link), epsilon))


def rate(link: LinkParams, epsilon: float) -> float:
    """Epsilon-outage rate in bit/s."""
    return link.bandwidth_hz * spectral_efficiency(link, epsilon)


def packet_time(link: LinkParams, epsilon: float) -> float:
    """Airtime of one packet, ``n_p / (2 B log2(1 + gamma_th))`` seconds."""
    if link.fixed_packet_time is not None:
        _check_epsilon(epsilon)
        return link.fixed_packet_time
    se = spectral_efficiency(link, epsilon)
    if se <= 0.0:
        raise ZeroDivisionError(f"zero spectral efficiency at epsilon={epsilon!r}")
    return link.packet_bits / (2.0 * link.bandwidth_hz * se)


def packet_count(data_bits: float, packet_bits: int) -> int:
    """Number of packets needed for ``data_bits`` (ceiling division)."""
    if data_bits <= 0:
        raise ValueError("data_bits must be > 0")
    # tolerate float noise such as 0.5e6/1.25
    return max(1, math.ceil(data_bits / packet_bits - 1e-9))


def tx_time_model(
    n_packets: int, epsilon: float, t_packet: float, *, check_left_tail: bool = True
) -> TxTimeModel:
    """Mean and variance of the block time for ``n_packets`` geometric retries.

    Raises :class:`LeftTailViolation` when ``mu - 4 sigma < 0`` unless
    ``check_left_tail`` is false.
    """
    if n_packets < 1:
        raise ValueError("n_packets must be >= 1")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon!r}")
    if not t_packet > 0:
        raise ValueError("t_packet must be > 0")
    if epsilon == 0.0:
        return TxTimeModel(n_packets, 0.0, t_packet, n_packets * t_packet, 0.0)
    mu = n_packets * t_packet / (1.0 - epsilon)
    sigma2 = n_packets * epsilon * t_packet**2 / (1.0 - epsilon) ** 2
    if check_left_tail and mu - 4.0 * math.sqrt(sigma2) < 0.0:
        raise LeftTailViolation(
            f"mu - 4 sigma < 0 for N={n_packets}, epsilon={epsilon}: "
            f"mu={mu:.6g}, sigma={math.sqrt(sigma2):.6g}"
        )
    return TxTimeModel(n_packets, epsilon, t_packet, mu, sigma2)


def tx_time_negbin_pmf(n_packets: int, epsilon: float, k: int) -> float:
    """Exact ``Pr(T_tx = k t_p)``: ``k`` total attempts, ``n_packets`` successes.

    The last attempt is always a success, so there are ``C(k-1, N-1)``
    arrangements of the ``k - N`` failures.
    """
    if k < n_packets:
        return 0.0
    if epsilon == 0.0:
        return 1.0 if k == n_packets else 0.0
    failures = k - n_packets
    log_p = (
        gammaln(k) - gammaln(n_packets) - gammaln(failures + 1)
        + failures * math.log(epsilon) + n_packets * math.log1p(-epsilon)
    )
    return math.exp(log_p)
