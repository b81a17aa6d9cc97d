"""Fit unpublished scenario constants to reference latency points.

Each target is ``(case, epsilon, rho_th, tau_s)``: the optimal
``rho_th``-quantile the model should reproduce.  Up to two free parameters
are fitted by nested bounded 1-D searches (outer over the first, inner over
the second), minimising the sum of squared relative residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.optimize import minimize_scalar

from .loop import Case
from .optimize import solve_p1
from .radio import linear_to_db
from .scenario import ScenarioFile

__all__ = ["Target", "FitParam", "FIT_PARAMS", "CalibrationResult", "calibrate", "apply_fit"]


@dataclass(frozen=True)
class Target:
    case: Case
    epsilon: float
    rho_th: float
    tau_s: float

    @classmethod
    def parse(cls, text: str) -> "Target":
        """``case:epsilon:rho:tau_ms``, e.g. ``2:1e-4:0.95:451``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"target must be case:epsilon:rho:tau_ms, got {text!r}")
        case, eps, rho, tau_ms = parts
        t = cls(Case.parse(case), float(eps), float(rho), float(tau_ms) * 1e-3)
        if not (0 < t.epsilon < 1 and 0 < t.rho_th < 1 and t.tau_s > 0):
            raise ValueError(f"target out of range: {text!r}")
        return t


@dataclass(frozen=True)
class FitParam:
    name: str
    lo: float
    hi: float
    log: bool  # search in log space
    apply: Callable[[ScenarioFile, float], ScenarioFile]
    integer: bool = False


def _set_comp_scale(sf: ScenarioFile, v: float) -> ScenarioFile:
    return sf.with_value("bs_server", "comp_scale", float(v))


def _set_packet_bits(sf: ScenarioFile, v: float) -> ScenarioFile:
    n = int(round(v))
    return sf.with_value("link_ho", "packet_bits", n).with_value("link_robot", "packet_bits", n)


def _k0_db(sf: ScenarioFile, link: str) -> float:
    k0 = sf.get(link, "friss_k0")
    return linear_to_db(k0) if k0 is not None else sf.get(link, "friss_k0_db")


def _add_gain_db(sf: ScenarioFile, v: float) -> ScenarioFile:
    # an extra link-budget gain on both hops, folded into the Friis constant
    for link in ("link_ho", "link_robot"):
        sf = sf.with_value(link, "friss_k0_db", _k0_db(sf, link) + float(v), drop=("friss_k0",))
    return sf


FIT_PARAMS = {
    "comp_scale": FitParam("comp_scale", 1.0, 1e4, True, _set_comp_scale),
    "packet_bits": FitParam("packet_bits", 1000.0, 100000.0, True, _set_packet_bits, integer=True),
    "gain_db": FitParam("gain_db", -30.0, 30.0, False, _add_gain_db),
}


@dataclass(frozen=True)
class CalibrationResult:
    values: dict[str, float]
    targets: tuple[Target, ...]
    model_tau_s: tuple[float, ...]
    scenario: ScenarioFile
    n_evals: int

    @property
    def residuals(self) -> tuple[float, ...]:
        """Relative residuals ``model / target - 1``."""
        return tuple(m / t.tau_s - 1.0 for m, t in zip(self.model_tau_s, self.targets))

    @property
    def max_abs_residual(self) -> float:
        return max(abs(r) for r in self.residuals)


def _model_taus(sf: ScenarioFile, targets, step_s: float) -> tuple[float, ...]:
    s = sf.to_params()
    num = sf.numerics
    return tuple(
        solve_p1(s, t.case, t.epsilon, t.rho_th, num.q_step, step_s, q_max=num.q_max,
                 coarse_q_step=num.coarse_q_step, tail=num.tail).tau_opt_s
        for t in targets
    )


def apply_fit(sf: ScenarioFile, values: dict[str, float]) -> ScenarioFile:
    for name, v in values.items():
        sf = FIT_PARAMS[name].apply(sf, v)
    return sf


def calibrate(
    sf: ScenarioFile,
    targets: Sequence[Target],
    params: Sequence[str] = ("comp_scale", "packet_bits"),
    step_s: float = 1e-4,
    xtol: float = 1e-4,
    source: str = "",
) -> CalibrationResult:
    """Nested bounded searches over one or two of :data:`FIT_PARAMS`."""
    targets = tuple(targets)
    if not targets:
        raise ValueError("need at least one target")
    if not 1 <= len(params) <= 2 or len(set(params)) != len(params):
        raise ValueError("fit one or two distinct parameters")
    specs = [FIT_PARAMS[p] for p in params]
    counter = [0]

    def to_value(p: FitParam, x: float) -> float:
        v = math.exp(x) if p.log else x
        return float(round(v)) if p.integer else float(v)

    def objective(values: dict[str, float]) -> float:
        counter[0] += 1
        try:
            taus = _model_taus(apply_fit(sf, values), targets, step_s)
        except (ValueError, ArithmeticError):
            # e.g. the left-tail check fails: push the search away
            return 1e6
        return sum((m / t.tau_s - 1.0) ** 2 for m, t in zip(taus, targets))

    def search(p: FitParam, f: Callable[[float], float]) -> tuple[float, float]:
        lo, hi = (math.log(p.lo), math.log(p.hi)) if p.log else (p.lo, p.hi)
        r = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                            options={"xatol": xtol * (1.0 if p.log else 10.0)})
        return to_value(p, r.x), float(r.fun)

    if len(specs) == 1:
        p = specs[0]
        best, _ = search(p, lambda x: objective({p.name: to_value(p, x)}))
        values = {p.name: best}
    else:
        outer, inner = specs

        def inner_best(v_outer: float) -> tuple[float, float]:
            return search(inner, lambda x: objective({outer.name: v_outer, inner.name: to_value(inner, x)}))

        v_out, _ = search(outer, lambda x: inner_best(to_value(outer, x))[1])
        v_in, _ = inner_best(v_out)
        values = {outer.name: v_out, inner.name: v_in}

    fitted = apply_fit(sf, values)
    taus = _model_taus(fitted, targets, step_s)
    result = CalibrationResult(values, targets, taus, fitted, counter[0])
    lines = [
        "Derived by `edgeloop calibrate`" + (f" from {source}" if source else "") + ".",
        "Fitted: " + ", ".join(f"{k} = {v!r}" for k, v in values.items()),
    ]
    for t, m, r in zip(targets, taus, result.residuals):
        lines.append(
            f"target {t.case.value} eps={t.epsilon!r} rho={t.rho_th!r}: "
            f"{t.tau_s * 1e3:.6g} ms, model {m * 1e3:.6g} ms, residual {r:+.3e}"
        )
    lines.append(f"Objective grid step {step_s!r} s; {counter[0]} model evaluations.")
    return CalibrationResult(values, targets, taus, fitted.with_comments(lines), counter[0])
