"""Monte Carlo ground truth for the closed-loop latency.

Samples every component from its own law and adds them up.  Transmission
times are drawn either from the exact negative binomial retry count or from
the Gaussian stand-in used by the analytic model.  Randomness comes from
numpy's Philox4x64 counter-based generator, one independent stream per
declared worker, so output depends only on ``(seed, n_workers)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import DiscretePmf, pmf_quantile
from .loop import ClosedLoopModel

__all__ = ["McConfig", "CdfComparison", "sample_closed_loop", "compare_cdf",
           "RNG_ALGORITHM", "DEFAULT_RHOS"]

RNG_ALGORITHM = "numpy.random.Philox (Philox4x64-10) seeded via SeedSequence.spawn"
DEFAULT_RHOS = (0.5, 0.9, 0.95, 0.99, 0.999)


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 1_000_000
    seed: int = 0
    tx_mode: str = "exact_negbin"
    n_workers: int = 1

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.n_workers < 1:
            raise ValueError("n_workers must be >= 1")
        if self.tx_mode not in ("exact_negbin", "gaussian_approx"):
            raise ValueError(f"unknown tx_mode {self.tx_mode!r}")


def _draw(m: ClosedLoopModel, rng: np.random.Generator, n: int, tx_mode: str) -> np.ndarray:
    total = np.zeros(n)
    for c in m.components:
        if c.kind == "point":
            total += c.a
        elif c.kind == "gamma":
            total += c.b * rng.standard_gamma(c.a, n)
        elif tx_mode == "exact_negbin" and c.label in m.tx_models:
            tx = m.tx_models[c.label]
            # failures before the N-th success; every attempt costs t_p
            failures = rng.negative_binomial(tx.n_packets, 1.0 - tx.epsilon, n)
            total += (tx.n_packets + failures) * tx.t_packet_s
        else:
            total += rng.normal(c.a, math.sqrt(c.b), n)
    return total


def sample_closed_loop(m: ClosedLoopModel, cfg: McConfig) -> np.ndarray:
    """``cfg.n_samples`` sorted draws of the loop latency (seconds)."""
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_workers)
    sizes = [cfg.n_samples // cfg.n_workers + (i < cfg.n_samples % cfg.n_workers)
             for i in range(cfg.n_workers)]
    parts = [
        _draw(m, np.random.Generator(np.random.Philox(child)), size, cfg.tx_mode)
        for child, size in zip(children, sizes)
    ]
    out = np.concatenate(parts)
    out.sort()
    return out


@dataclass(frozen=True)
class CdfComparison:
    ks_distance: float
    quantile_errors: dict[float, float]  # analytic minus empirical, seconds
    quantile_se: dict[float, float]  # Monte Carlo standard error of the empirical quantile
    n_samples: int


def _empirical_quantile(samples: np.ndarray, rho: float) -> float:
    k = max(math.ceil(rho * samples.size) - 1, 0)
    return float(samples[k])


def _quantile_se(samples: np.ndarray, rho: float) -> float:
    # distribution-free: order statistics one binomial s.d. either side
    n = samples.size
    half = math.sqrt(n * rho * (1.0 - rho))
    k = rho * n
    lo = int(min(max(math.floor(k - half), 0), n - 1))
    hi = int(min(max(math.ceil(k + half), 0), n - 1))
    return 0.5 * float(samples[hi] - samples[lo])


def compare_cdf(
    analytic: DiscretePmf, samples, rhos=DEFAULT_RHOS
) -> CdfComparison:
    """Kolmogorov-Smirnov distance and quantile gaps between a PMF and samples.

    Each PMF point stands for the cell ``[t - dt/2, t + dt/2)``, so the
    distance is the largest gap between the two CDFs over the upper cell
    edges: a KS distance at grid resolution.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("need at least one sample")
    n = x.size
    half = 0.5 * analytic.step_s
    edges = analytic.grid + half
    emp = np.searchsorted(x, edges, side="right") / n
    ks = float(np.max(np.abs(analytic.cdf - emp)))
    errs = {r: pmf_quantile(analytic, r) - _empirical_quantile(x, r) for r in rhos}
    ses = {r: _quantile_se(x, r) for r in rhos}
    return CdfComparison(ks, errs, ses, n)
