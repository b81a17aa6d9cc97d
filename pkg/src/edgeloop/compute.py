"""Gamma latency models for computation, compression and decompression.

Per-bit CPU cycle counts are Gamma distributed; dividing by the clock and
multiplying by the data volume keeps the law Gamma with a rescaled scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ServerParams",
    "CompressionParams",
    "GammaDist",
    "compression_cycles",
    "computation_time_dist",
    "compression_time_dist",
    "decompression_time_dist",
]

DEFAULT_COMP_SCALE = 100.0  # cycles/bit


@dataclass(frozen=True)
class ServerParams:
    shape: float
    freq_hz: float
    comp_scale: float = DEFAULT_COMP_SCALE

    def __post_init__(self) -> None:
        for name in ("shape", "freq_hz", "comp_scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class CompressionParams:
    psi: float
    zeta: float
    q: float = 1.0

    def __post_init__(self) -> None:
        if not self.psi > 0:
            raise ValueError("psi must be > 0")
        if not 0.0 < self.zeta < 1.0:
            raise ValueError("zeta must lie in (0, 1)")
        if not self.q >= 1.0:
            raise ValueError("compression ratio q must be >= 1")


@dataclass(frozen=True)
class GammaDist:
    """Gamma law in seconds; ``scale == 0`` is a point mass at zero."""

    shape: float
    scale: float

    def __post_init__(self) -> None:
        if not self.shape > 0:
            raise ValueError("shape must be > 0")
        if not self.scale >= 0:
            raise ValueError("scale must be >= 0")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def var(self) -> float:
        return self.shape * self.scale**2

    @property
    def is_point_mass(self) -> bool:
        return self.scale == 0.0


def compression_cycles(q: float, psi: float) -> float:
    """Mean cycles per raw bit to compress at ratio ``q``: ``e^(q psi) - e^psi``."""
    if not q >= 1.0:
        raise ValueError(f"compression ratio must be >= 1, got {q!r}")
    if not psi > 0:
        raise ValueError("psi must be > 0")
    # e^psi * expm1((q-1) psi) is exact at q=1 and accurate just above it
    return math.exp(psi) * math.expm1((q - 1.0) * psi)


def computation_time_dist(server: ServerParams, data_bits: float) -> GammaDist:
    if data_bits < 0:
        raise ValueError("data_bits must be >= 0")
    return GammaDist(server.shape, data_bits * server.comp_scale / server.freq_hz)


def compression_time_dist(
    server: ServerParams, data_bits: float, cp: CompressionParams
) -> GammaDist:
    """Compression of ``data_bits`` raw bits on ``server`` (the robot)."""
    if data_bits < 0:
        raise ValueError("data_bits must be >= 0")
    cycles = compression_cycles(cp.q, cp.psi)
    return GammaDist(server.shape, data_bits * cycles / (server.shape * server.freq_hz))


def decompression_time_dist(
    server: ServerParams, compressed_bits: float, cp: CompressionParams
) -> GammaDist:
    """Decompression on ``server``; callers pass the compressed volume ``D_s / Q``."""
    if compressed_bits < 0:
        raise ValueError("compressed_bits must be >= 0")
    cycles = cp.zeta * compression_cycles(cp.q, cp.psi)
    return GammaDist(server.shape, compressed_bits * cycles / (server.shape * server.freq_hz))
