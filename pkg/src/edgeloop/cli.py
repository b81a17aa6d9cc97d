"""``edgeloop`` command line: scenario-driven experiments written as CSV.

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import GAP_COLUMNS, bound_gap_surface
from .calibrate import FIT_PARAMS, Target, calibrate
from .dist import QuantileConvergenceError, discretize, pmf_quantile
from .loop import Case, build_model, closed_loop_pmf
from .optimize import RESULT_COLUMNS, epsilon_scan, q_grid, solve_p1, solve_p2_average
from .oracle import RNG_ALGORITHM, McConfig, compare_cdf, sample_closed_loop
from .radio import LeftTailViolation
from .scenario import CALIBRATED_SCENARIO, REFERENCE_SCENARIO, ScenarioError, ScenarioFile, load_scenario

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4
KS_THRESHOLD = 0.005
TOTAL_LABEL = "T_total"
SCENARIO_ALIASES = {"paper_sec6": REFERENCE_SCENARIO, "paper_sec6_calibrated": CALIBRATED_SCENARIO}


class ConfigError(Exception):
    pass


class ValidationFailure(Exception):
    pass


# -- argument helpers ---------------------------------------------------------


def parse_grid(text: str) -> list[float]:
    """``a,b,c`` | ``lo:hi:step`` (inclusive) | ``geom:lo:hi:n``."""
    text = text.strip()
    try:
        if text.startswith("geom:"):
            _, lo, hi, n = text.split(":")
            return [float(v) for v in np.geomspace(float(lo), float(hi), int(n))]
        if ":" in text:
            lo, hi, step = (float(v) for v in text.split(":"))
            return q_grid(hi, step, q_min=lo).tolist()
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from exc


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(header, rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])


def _scenario(args) -> ScenarioFile:
    path = SCENARIO_ALIASES.get(args.scenario, args.scenario)
    return load_scenario(path)


def _params(args, sf: ScenarioFile):
    s = sf.to_params()
    if getattr(args, "robot_freq_hz", None):
        s = s.with_robot_freq(args.robot_freq_hz)
    return s


def _step(args, sf: ScenarioFile) -> float:
    return args.step if args.step is not None else sf.numerics.step_s


# -- commands -----------------------------------------------------------------


def cmd_cdf(args, out) -> None:
    sf = _scenario(args)
    s = _params(args, sf)
    step, tail = _step(args, sf), sf.numerics.tail
    combos = [(q, e) for e in args.epsilon for q in args.q]
    rho_max = max(args.rho) if args.rho else None
    rows = []
    for q, eps in combos:
        m = build_model(s, args.case, q, eps)
        suffix = f"|q={q!r}|eps={eps!r}" if len(combos) > 1 else ""
        total = closed_loop_pmf(m, step, tail)
        t_max = pmf_quantile(total, rho_max) if rho_max is not None else math.inf
        parts = [(c.label, discretize(c, step, tail)) for c in m.components]
        for label, p in parts + [(TOTAL_LABEL, total)]:
            for t, _, c in p.to_rows():
                if t > t_max:
                    break
                rows.append((t, label + suffix, c))
    _write_csv(("t_seconds", "component", "cdf"), rows, out)


def cmd_pmf(args, out) -> None:
    sf = _scenario(args)
    s = _params(args, sf)
    m = build_model(s, args.case, args.q, args.epsilon)
    _write_csv(("t_seconds", "pmf", "cdf"),
               closed_loop_pmf(m, _step(args, sf), sf.numerics.tail).to_rows(), out)


def _gap_rows(s, case, qs, rho, step, tail, eps):
    return [r.as_tuple() for r in bound_gap_surface(s, case, qs, [eps], rho, step, tail)]


def cmd_bounds(args, out) -> None:
    sf = _scenario(args)
    s = _params(args, sf)
    fn = partial(_gap_rows, s, args.case, args.q_grid, args.rho, _step(args, sf), sf.numerics.tail)
    if args.jobs > 1 and len(args.eps_grid) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(fn, args.eps_grid))
    else:
        chunks = [fn(e) for e in args.eps_grid]
    _write_csv(GAP_COLUMNS, [r for chunk in chunks for r in chunk], out)


def cmd_optimize(args, out) -> None:
    sf = _scenario(args)
    s = _params(args, sf)
    num = sf.numerics
    step = _step(args, sf)
    kw = dict(q_step=num.q_step, grid_step_s=step, q_max=num.q_max,
              coarse_q_step=num.coarse_q_step, tail=num.tail, jobs=args.jobs)
    if args.search_epsilon:
        rows = []
        for eps in args.eps_grid:
            for rho in args.rho:
                for e, q, tau in epsilon_scan(s, args.case, eps, rho, **kw):
                    rows.append((eps, rho, e, q, tau))
        _write_csv(("eps_th", "rho_th", "epsilon", "q_opt", "tau_opt_s"), rows, out)
        return
    p2_kw = dict(q_max=num.q_max, q_step=num.q_step, grid_step_s=step, tail=num.tail)
    if args.mode == "both":
        rows = []
        for eps in args.eps_grid:
            avg = solve_p2_average(s, args.case, eps, **p2_kw)
            for rho in args.rho:
                stat = solve_p1(s, args.case, eps, rho, **kw)
                rows.append((rho, stat.tau_opt_s, avg.tau_opt_s, avg.rho_achieved,
                             eps, stat.q_opt, avg.q_opt))
        # the four comparison columns first; the rest tell rows of a multi-outage run apart
        _write_csv(("rho_th", "tau_statistical", "tau_average", "rho_achieved_average",
                    "epsilon", "q_statistical", "q_average"), rows, out)
        return
    rows = []
    for eps in args.eps_grid:
        for rho in args.rho:
            if args.mode == "statistical":
                r = solve_p1(s, args.case, eps, rho, **kw)
            else:
                r = solve_p2_average(s, args.case, eps, rho_th=rho, **p2_kw)
            rows.append(r.as_row())
    _write_csv(RESULT_COLUMNS, rows, out)


def cmd_validate(args, out) -> None:
    sf = _scenario(args)
    s = _params(args, sf)
    num = sf.numerics
    cfg = McConfig(
        n_samples=args.n_samples or num.n_samples,
        seed=num.seed,
        tx_mode=args.tx_mode or num.tx_mode,
        n_workers=num.n_workers,
    )
    m = build_model(s, args.case, args.q, args.epsilon)
    step = args.step if args.step is not None else 1e-4
    pmf = closed_loop_pmf(m, step, num.tail)
    samples = sample_closed_loop(m, cfg)
    if args.dump_samples:
        dump = Path(args.dump_samples)
        if dump.suffix == ".npy":
            np.save(dump, samples)
        else:
            np.savetxt(dump, samples, fmt="%.17g", header="latency_s", comments="")
    cmp = compare_cdf(pmf, samples)
    rows = [("ks_distance", cmp.ks_distance), ("ks_threshold", args.ks_threshold),
            ("n_samples", cmp.n_samples), ("seed", cfg.seed), ("rng", RNG_ALGORITHM),
            ("step_s", step)]
    for rho in sorted(cmp.quantile_errors):
        rows.append((f"quantile_error_{rho!r}", cmp.quantile_errors[rho]))
        rows.append((f"quantile_se_{rho!r}", cmp.quantile_se[rho]))
    passed = cmp.ks_distance <= args.ks_threshold
    rows.append(("status", "pass" if passed else "fail"))
    _write_csv(("metric", "value"), rows, out)
    if not passed:
        raise ValidationFailure(f"KS distance {cmp.ks_distance:.3g} exceeds {args.ks_threshold}")


def cmd_calibrate(args, out) -> None:
    sf = _scenario(args)
    try:
        targets = [Target.parse(t) for t in args.target]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    params = tuple(p.strip() for p in args.fit.split(","))
    unknown = [p for p in params if p not in FIT_PARAMS]
    if unknown:
        raise ConfigError(f"unknown fit parameter(s) {unknown}; choose from {sorted(FIT_PARAMS)}")
    res = calibrate(sf, targets, params, step_s=args.step or 1e-4, source=str(args.scenario))
    out.write(res.scenario.dumps())
    for t, r in zip(res.targets, res.residuals):
        print(f"calibrate: {t.case.value} eps={t.epsilon:g} residual {r:+.3e}", file=sys.stderr)


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="scenario file, or 'paper_sec6' for the bundled one")
    common.add_argument("--out", help="write CSV here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--step", type=float, default=None, help="PMF grid step in seconds")
    common.add_argument("--robot-freq-hz", type=float, default=None,
                        help="override the robot CPU frequency")

    def case_arg(p):
        p.add_argument("--case", type=Case.parse, default=Case.COMPRESS_AT_ROBOT,
                       help="compress_at_robot (1) or raw_offload (2)")

    p = argparse.ArgumentParser(prog="edgeloop", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"edgeloop {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cdf", parents=[common], help="component and closed-loop CDFs")
    case_arg(c)
    c.add_argument("--q", type=parse_grid, default=[1.0])
    c.add_argument("--epsilon", type=parse_grid, required=True)
    c.add_argument("--rho", type=parse_grid, default=None,
                   help="truncate each curve at the closed-loop quantile of max(rho)")
    c.set_defaults(func=cmd_cdf)

    c = sub.add_parser("pmf", parents=[common], help="closed-loop PMF export")
    case_arg(c)
    c.add_argument("--q", type=float, default=1.0)
    c.add_argument("--epsilon", type=float, required=True)
    c.set_defaults(func=cmd_pmf)

    c = sub.add_parser("bounds", parents=[common], help="bound gap surface")
    case_arg(c)
    c.add_argument("--q-grid", type=parse_grid, default=parse_grid("1.01:1.5:0.01"))
    c.add_argument("--eps-grid", type=parse_grid, default=parse_grid("geom:1e-4:1e-2:10"))
    c.add_argument("--rho", type=float, default=0.95)
    c.set_defaults(func=cmd_bounds)

    c = sub.add_parser("optimize", parents=[common], help="latency-optimal compression ratio")
    case_arg(c)
    c.add_argument("--mode", choices=("statistical", "average", "both"), default="statistical")
    c.add_argument("--eps-grid", type=parse_grid, required=True)
    c.add_argument("--rho", type=parse_grid, default=[0.95])
    c.add_argument("--search-epsilon", action="store_true",
                   help="also scan outages below each threshold (debug)")
    c.set_defaults(func=cmd_optimize)

    c = sub.add_parser("validate", parents=[common], help="analytic CDF vs Monte Carlo")
    case_arg(c)
    c.add_argument("--q", type=float, default=1.0)
    c.add_argument("--epsilon", type=float, required=True)
    c.add_argument("--n-samples", type=int, default=None)
    c.add_argument("--tx-mode", choices=("exact_negbin", "gaussian_approx"), default=None)
    c.add_argument("--ks-threshold", type=float, default=KS_THRESHOLD)
    c.add_argument("--dump-samples", default=None, help=".npy or CSV path for raw samples")
    c.set_defaults(func=cmd_validate)

    c = sub.add_parser("calibrate", parents=[common], help="fit unpublished constants")
    c.add_argument("--target", action="append", required=True,
                   help="case:epsilon:rho:tau_ms, repeatable")
    c.add_argument("--fit", default="comp_scale,packet_bits",
                   help=f"one or two of {','.join(FIT_PARAMS)}")
    c.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        args.func(args, buf)
    except (ScenarioError, ConfigError) as exc:
        print(f"edgeloop: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationFailure as exc:
        _emit(args, buf)
        print(f"edgeloop: validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (LeftTailViolation, QuantileConvergenceError, ArithmeticError, AssertionError) as exc:
        print(f"edgeloop: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"edgeloop: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(args, buf)
    return EXIT_OK


def _emit(args, buf: io.StringIO) -> None:
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


if __name__ == "__main__":
    sys.exit(main())
