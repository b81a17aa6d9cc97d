"""Lower and upper bounds on a quantile of the closed-loop latency.

For independent non-negative components the ``rho``-quantile of the sum is
at least the largest component quantile and at most the sum of component
quantiles; Markov's inequality gives a second upper arm ``mean / (1 - rho)``.
Component quantiles are taken from the exact analytic laws.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .dist import DEFAULT_STEP_S, DEFAULT_TAIL, pmf_quantile
from .loop import Case, ClosedLoopModel, ScenarioParams, build_model, closed_loop_pmf

__all__ = ["BoundsResult", "GapRow", "quantile_bounds", "bound_gap_surface", "GAP_COLUMNS"]

GAP_COLUMNS = ("q", "epsilon", "tau_opt", "tau_lower", "tau_upper", "gap_lower", "gap_upper")


@dataclass(frozen=True)
class BoundsResult:
    tau_lower_s: float
    tau_upper_s: float
    markov_arm_s: float
    sum_arm_s: float
    binding_arm: str  # "markov" or "quantile_sum"


@dataclass(frozen=True)
class GapRow:
    q: float
    epsilon: float
    tau_opt: float
    tau_lower: float
    tau_upper: float

    @property
    def gap_lower(self) -> float:
        return self.tau_opt - self.tau_lower

    @property
    def gap_upper(self) -> float:
        return self.tau_upper - self.tau_opt

    def as_tuple(self) -> tuple[float, ...]:
        return (self.q, self.epsilon, self.tau_opt, self.tau_lower, self.tau_upper,
                self.gap_lower, self.gap_upper)


def quantile_bounds(m: ClosedLoopModel, rho_th: float) -> BoundsResult:
    if not 0.0 < rho_th < 1.0:
        raise ValueError(f"rho_th must lie in (0, 1), got {rho_th!r}")
    quantiles = [c.quantile(rho_th) for c in m.components]
    lower = max(quantiles)
    sum_arm = sum(quantiles)
    markov = m.mean_s / (1.0 - rho_th)
    if markov < sum_arm:
        upper, arm = markov, "markov"
    else:
        upper, arm = sum_arm, "quantile_sum"
    return BoundsResult(lower, upper, markov, sum_arm, arm)


def bound_gap_surface(
    s: ScenarioParams,
    case: Case | str,
    q_grid: Sequence[float],
    eps_grid: Sequence[float],
    rho_th: float,
    step_s: float = DEFAULT_STEP_S,
    tail: float = DEFAULT_TAIL,
) -> list[GapRow]:
    """Bounds and the discretized quantile on every ``(q, epsilon)`` pair.

    Raw offload ignores ``q_grid`` and reports one row per ``epsilon`` at ``q = 1``.
    """
    case = Case.parse(case)
    if len(eps_grid) == 0 or (case is Case.COMPRESS_AT_ROBOT and len(q_grid) == 0):
        raise ValueError("grids must be non-empty")
    qs: Iterable[float] = [1.0] if case is Case.RAW_OFFLOAD else q_grid
    rows = []
    for eps in eps_grid:
        for q in qs:
            m = build_model(s, case, q, eps)
            b = quantile_bounds(m, rho_th)
            tau = pmf_quantile(closed_loop_pmf(m, step_s, tail), rho_th)
            rows.append(GapRow(float(q), float(eps), tau, b.tau_lower_s, b.tau_upper_s))
    return rows
