"""Reliability-constrained latency minimisation over the compression ratio.

The statistical design fixes the outage at its ceiling (a higher outage
always buys a faster rate), uses the quantile bounds to cut the range of
compression ratios worth evaluating, then convolves the full PMF on the
surviving grid points.  The average design minimises the mean instead and
reports which reliability that choice actually delivers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence

import numpy as np
from scipy.optimize import golden, minimize_scalar

from .bounds import quantile_bounds
from .dist import DEFAULT_STEP_S, DEFAULT_TAIL, pmf_quantile
from .loop import Case, ScenarioParams, analytic_mean, build_model, closed_loop_pmf

__all__ = [
    "OptimizationResult",
    "SweepRow",
    "q_grid",
    "solve_p1",
    "solve_p2_average",
    "sweep_epsilon",
    "epsilon_scan",
    "RESULT_COLUMNS",
]

RESULT_COLUMNS = ("mode", "case", "epsilon", "rho_th", "q_opt", "tau_opt_s", "rho_achieved",
                  "q_lo", "q_hi", "n_evals")

STATISTICAL = "statistical_p1"
AVERAGE = "average_p2"


@dataclass(frozen=True)
class OptimizationResult:
    q_opt: float
    eps_opt: float
    tau_opt_s: float
    rho_achieved: float
    q_search_interval: tuple[float, float]
    evals: tuple[tuple[float, float], ...]
    mode: str
    case: Case = Case.COMPRESS_AT_ROBOT
    rho_th: float = math.nan
    q_pruned: tuple[float, ...] = field(default=(), repr=False)

    def as_row(self) -> tuple:
        return (self.mode, self.case.value, self.eps_opt, self.rho_th, self.q_opt,
                self.tau_opt_s, self.rho_achieved, self.q_search_interval[0],
                self.q_search_interval[1], len(self.evals))


def q_grid(q_max: float, step: float, q_min: float = 1.0) -> np.ndarray:
    """Equispaced compression ratios ``q_min, q_min + step, ... <= q_max``."""
    if not step > 0:
        raise ValueError("q step must be > 0")
    n = int(math.floor((q_max - q_min) / step + 1e-9))
    # rounding keeps grid points bit-identical across callers
    return np.round(q_min + step * np.arange(n + 1), 10)


def _tau(s, case, eps, rho_th, step_s, tail, q):
    return pmf_quantile(closed_loop_pmf(build_model(s, case, q, eps), step_s, tail), rho_th)


def _evaluate(qs, fn, jobs: int) -> list[float]:
    if jobs > 1 and len(qs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, qs, chunksize=max(1, len(qs) // (4 * jobs))))
    return [fn(q) for q in qs]


def solve_p1(
    s: ScenarioParams,
    case: Case | str,
    eps_th: float,
    rho_th: float,
    q_step: float = 0.01,
    grid_step_s: float = DEFAULT_STEP_S,
    *,
    q_max: float = 3.0,
    coarse_q_step: float = 0.05,
    tail: float = DEFAULT_TAIL,
    prune_margin_steps: float = 3.0,
    exhaustive: bool = False,
    jobs: int = 1,
) -> OptimizationResult:
    """Smallest ``rho_th``-quantile of the loop latency over the compression grid.

    ``exhaustive`` skips the bound-based pruning and evaluates every grid point.
    Ties go to the smaller compression ratio.
    """
    case = Case.parse(case)
    if not 0.0 < eps_th < 1.0:
        raise ValueError("eps_th must lie in (0, 1)")
    if not 0.0 < rho_th < 1.0:
        raise ValueError("rho_th must lie in (0, 1)")
    tau_of = partial(_tau, s, case, eps_th, rho_th, grid_step_s, tail)

    if case is Case.RAW_OFFLOAD:
        pmf = closed_loop_pmf(build_model(s, case, 1.0, eps_th), grid_step_s, tail)
        tau = pmf_quantile(pmf, rho_th)
        return OptimizationResult(1.0, eps_th, tau, float(pmf.cdf_at(tau)), (1.0, 1.0),
                                  ((1.0, tau),), STATISTICAL, case, rho_th, (1.0,))

    fine = q_grid(q_max, q_step)
    if exhaustive:
        candidates = fine
    else:
        coarse = q_grid(q_max, coarse_q_step)
        tau_u_opt = min(quantile_bounds(build_model(s, case, q, eps_th), rho_th).tau_upper_s
                        for q in coarse)
        lower = np.array([quantile_bounds(build_model(s, case, q, eps_th), rho_th).tau_lower_s
                          for q in fine])
        # discretized quantiles may sit a grid step or two outside the analytic sandwich
        keep = lower <= tau_u_opt + prune_margin_steps * grid_step_s
        if not keep.any():
            raise AssertionError("empty compression-ratio search set; bounds are inconsistent")
        candidates = fine[keep]

    taus = _evaluate(candidates.tolist(), tau_of, jobs)
    best = int(np.argmin(taus))  # first minimum, i.e. smallest q on ties
    q_opt, tau_opt = float(candidates[best]), float(taus[best])
    pmf = closed_loop_pmf(build_model(s, case, q_opt, eps_th), grid_step_s, tail)
    return OptimizationResult(
        q_opt, eps_th, tau_opt, float(pmf.cdf_at(tau_opt)),
        (float(candidates[0]), float(candidates[-1])),
        tuple(zip(candidates.tolist(), taus)), STATISTICAL, case, rho_th,
        tuple(candidates.tolist()),
    )


def solve_p2_average(
    s: ScenarioParams,
    case: Case | str,
    eps_th: float,
    *,
    rho_th: float = math.nan,
    q_max: float = 3.0,
    q_step: float = 0.01,
    grid_step_s: float = DEFAULT_STEP_S,
    tail: float = DEFAULT_TAIL,
) -> OptimizationResult:
    """Minimise the mean latency; ``rho_achieved`` is the CDF at that mean."""
    case = Case.parse(case)

    def mean_of(q: float) -> float:
        return analytic_mean(s, case, q, eps_th)

    if case is Case.RAW_OFFLOAD:
        q_opt, evals = 1.0, ((1.0, mean_of(1.0)),)
        interval = (1.0, 1.0)
    else:
        grid = q_grid(q_max, q_step)
        means = [mean_of(q) for q in grid]
        k = int(np.argmin(means))
        lo, hi = float(grid[max(k - 1, 0)]), float(grid[min(k + 1, grid.size - 1)])
        q_opt = float(grid[k])
        if lo < q_opt < hi:
            q_gs = float(golden(mean_of, brack=(lo, q_opt, hi), tol=1e-8))
            if lo <= q_gs <= hi and mean_of(q_gs) < mean_of(q_opt):
                q_opt = q_gs
        elif k == 0 and grid.size > 1:
            # minimum at the boundary q = 1: bounded refinement inside the first cell
            r = minimize_scalar(mean_of, bounds=(1.0, hi), method="bounded",
                                options={"xatol": 1e-8})
            q_gs = float(r.x)
            if mean_of(q_gs) < mean_of(q_opt):
                q_opt = q_gs
        evals = tuple(zip(grid.tolist(), means))
        interval = (float(grid[0]), float(grid[-1]))
    tau = mean_of(q_opt)
    pmf = closed_loop_pmf(build_model(s, case, q_opt, eps_th), grid_step_s, tail)
    return OptimizationResult(q_opt, eps_th, tau, float(pmf.cdf_at(tau)), interval, evals,
                              AVERAGE, case, rho_th)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    tau_case1: float
    q_case1: float
    tau_case2: float


def sweep_epsilon(
    s: ScenarioParams,
    eps_grid: Sequence[float],
    rho_th: float,
    **kwargs,
) -> list[SweepRow]:
    """Statistical optimum of both designs at every outage in ``eps_grid``."""
    if len(eps_grid) == 0:
        raise ValueError("eps_grid must be non-empty")
    rows = []
    for eps in eps_grid:
        r1 = solve_p1(s, Case.COMPRESS_AT_ROBOT, eps, rho_th, **kwargs)
        r2 = solve_p1(s, Case.RAW_OFFLOAD, eps, rho_th, **kwargs)
        rows.append(SweepRow(float(eps), r1.tau_opt_s, r1.q_opt, r2.tau_opt_s))
    return rows


def epsilon_scan(
    s: ScenarioParams, case: Case | str, eps_th: float, rho_th: float, n: int = 8, **kwargs
) -> list[tuple[float, float, float]]:
    """``(epsilon, q_opt, tau_opt)`` for outages below ``eps_th``.

    A debugging aid: the optimum should always sit at ``eps_th`` itself.
    """
    eps_values = np.geomspace(eps_th / 10.0, eps_th, n)
    out = []
    for eps in eps_values:
        r = solve_p1(s, case, float(eps), rho_th, **kwargs)
        out.append((float(eps), r.q_opt, r.tau_opt_s))
    return out
