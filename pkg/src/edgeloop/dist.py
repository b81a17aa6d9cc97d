"""Uniform-grid PMFs and the analytic CDF/quantile evaluators behind them.

Continuous laws are binned on the global grid ``[k dt, (k+1) dt)``; each
bin's probability is carried at its midpoint, so summing discretized
components does not drift the mean.  Point masses stay exactly where they
are.  Grids only need a common step to be convolved; origins are free.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln, ndtr

__all__ = [
    "QuantileConvergenceError",
    "ComponentDist",
    "DiscretePmf",
    "gamma_cdf",
    "gamma_quantile",
    "gaussian_cdf",
    "gaussian_quantile",
    "discretize",
    "convolve",
    "convolve_all",
    "pmf_quantile",
    "total_variation",
    "DEFAULT_STEP_S",
    "DEFAULT_TAIL",
]

DEFAULT_STEP_S = 1e-3
DEFAULT_TAIL = 1e-9
FFT_THRESHOLD = 2**15

_MAX_SERIES = 2000
_MAX_CF = 2000
_TINY = 1e-300


class QuantileConvergenceError(ArithmeticError):
    """Root finding for a quantile hit its iteration cap."""


# ---------------------------------------------------------------------------
# regularized incomplete gamma
# ---------------------------------------------------------------------------

def _gamma_p_series(a: float, x: np.ndarray) -> np.ndarray:
    # P(a, x) = e^-x x^a / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
    term = np.ones_like(x)
    total = np.ones_like(x)
    ap = a
    for _ in range(_MAX_SERIES):
        ap += 1.0
        term = term * x / ap
        total = total + term
        if np.all(np.abs(term) <= np.abs(total) * 1e-16):
            break
    else:
        raise ArithmeticError(f"incomplete gamma series did not converge for a={a}")
    log_pref = -x + a * np.log(x) - gammaln(a + 1.0)
    return total * np.exp(log_pref)


def _gamma_q_cf(a: float, x: np.ndarray) -> np.ndarray:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _MAX_CF + 1):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= 1e-15):
            break
    else:
        raise ArithmeticError(f"incomplete gamma continued fraction did not converge for a={a}")
    log_pref = -x + a * np.log(x) - gammaln(a)
    return np.exp(log_pref) * h


def gamma_cdf(t, shape: float, scale: float):
    """Gamma CDF via the regularized lower incomplete gamma function.

    Works on scalars or arrays of ``t``.  ``scale == 0`` is a point mass at 0.
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    if scale == 0.0:
        out = (t_arr >= 0.0).astype(float)
        return float(out[0]) if scalar else out
    x = t_arr / scale
    out = np.zeros_like(x)
    out[np.isposinf(x)] = 1.0
    pos = (x > 0.0) & np.isfinite(x)
    use_series = pos & (x < shape + 1.0)
    use_cf = pos & ~use_series
    if use_series.any():
        out[use_series] = _gamma_p_series(shape, x[use_series])
    if use_cf.any():
        out[use_cf] = 1.0 - _gamma_q_cf(shape, x[use_cf])
    np.clip(out, 0.0, 1.0, out=out)
    return float(out[0]) if scalar else out


def _gamma_pdf_unit(x: float, shape: float) -> float:
    if x <= 0.0:
        return 0.0
    return math.exp((shape - 1.0) * math.log(x) - x - math.lgamma(shape))


def gaussian_cdf(t, mu: float, sigma2: float):
    t_arr = np.asarray(t, dtype=float)
    if sigma2 == 0.0:
        out = (t_arr >= mu).astype(float)
    else:
        out = ndtr((t_arr - mu) / math.sqrt(sigma2))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# quantile inversion
# ---------------------------------------------------------------------------

def _check_rho(rho: float) -> None:
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho!r}")


def _invert(
    cdf: Callable[[float], float],
    pdf: Callable[[float], float],
    rho: float,
    lo: float,
    hi: float,
    x0: float,
    what: str,
    max_iter: int = 400,
) -> float:
    """Newton iteration kept inside a bisection bracket ``cdf(lo) <= rho <= cdf(hi)``."""
    x = min(max(x0, lo), hi)
    f = cdf(x) - rho
    for _ in range(max_iter):
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4e-16 * max(abs(lo), abs(hi), _TINY):
            return x if abs(f) <= abs(cdf(hi) - rho) else hi
        dens = pdf(x)
        x_new = x - f / dens if dens > 0.0 else math.nan
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        x = x_new
        f = cdf(x) - rho
        if abs(f) <= 1e-14:
            return x
    raise QuantileConvergenceError(
        f"{what} quantile did not converge for rho={rho!r}: bracket=[{lo!r}, {hi!r}], "
        f"last x={x!r}, residual={f!r}"
    )


def gamma_quantile(shape: float, scale: float, rho: float) -> float:
    """Smallest ``t`` with ``GammaCDF(t) = rho`` (to ~1e-14 in probability)."""
    _check_rho(rho)
    if not shape > 0:
        raise ValueError("shape must be > 0")
    if scale == 0.0:
        return 0.0
    return scale * _unit_gamma_quantile(float(shape), float(rho))


@functools.lru_cache(maxsize=4096)
def _unit_gamma_quantile(shape: float, rho: float) -> float:
    # Wilson-Hilferty start
    z = math.sqrt(2.0) * _erfinv(2.0 * rho - 1.0)
    c = 1.0 / (9.0 * shape)
    x0 = shape * (1.0 - c + z * math.sqrt(c)) ** 3
    if not x0 > 0.0:
        # small-x form of the lower tail: P(a, x) ~ x^a / Gamma(a+1)
        x0 = math.exp((math.log(rho) + math.lgamma(shape + 1.0)) / shape)
    hi = max(x0, shape, 1.0)
    while gamma_cdf(hi, shape, 1.0) < rho:
        hi *= 2.0
    x = _invert(
        lambda v: gamma_cdf(v, shape, 1.0),
        lambda v: _gamma_pdf_unit(v, shape),
        rho, 0.0, hi, x0, "gamma",
    )
    return x


def gaussian_quantile(mu: float, sigma2: float, rho: float) -> float:
    _check_rho(rho)
    if sigma2 < 0:
        raise ValueError("sigma2 must be >= 0")
    if sigma2 == 0.0:
        return mu
    z = _invert(
        lambda v: float(ndtr(v)),
        lambda v: math.exp(-0.5 * v * v) / math.sqrt(2.0 * math.pi),
        rho, -40.0, 40.0, 0.0, "gaussian",
    )
    return mu + math.sqrt(sigma2) * z


def _erfinv(y: float) -> float:
    # Winitzki's closed form; only used as a Newton starting point
    if y <= -1.0:
        return -6.0
    if y >= 1.0:
        return 6.0
    a = 0.147
    ln = math.log(1.0 - y * y)
    t = 2.0 / (math.pi * a) + ln / 2.0
    return math.copysign(math.sqrt(math.sqrt(t * t - ln / a) - t), y)


# ---------------------------------------------------------------------------
# component laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComponentDist:
    """One latency component: ``kind`` is ``gaussian``, ``gamma`` or ``point``.

    ``a``/``b`` are (mu, sigma2), (shape, scale) or (t, 0) respectively.
    """

    kind: str
    a: float
    b: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind == "gaussian":
            if not self.b >= 0:
                raise ValueError("sigma2 must be >= 0")
        elif self.kind == "gamma":
            if not (self.a > 0 and self.b >= 0):
                raise ValueError("gamma needs shape > 0 and scale >= 0")
        elif self.kind == "point":
            if not self.a >= 0:
                raise ValueError("point mass must sit at t >= 0")
        else:
            raise ValueError(f"unknown component kind {self.kind!r}")

    @classmethod
    def gaussian(cls, mu: float, sigma2: float, label: str = "") -> "ComponentDist":
        if sigma2 == 0.0:
            return cls("point", mu, 0.0, label)
        return cls("gaussian", mu, sigma2, label)

    @classmethod
    def gamma(cls, shape: float, scale: float, label: str = "") -> "ComponentDist":
        if scale == 0.0:
            return cls("point", 0.0, 0.0, label)
        return cls("gamma", shape, scale, label)

    @classmethod
    def point(cls, t: float, label: str = "") -> "ComponentDist":
        return cls("point", t, 0.0, label)

    @property
    def is_point(self) -> bool:
        return self.kind == "point"

    @property
    def mean(self) -> float:
        if self.kind == "gamma":
            return self.a * self.b
        return self.a

    @property
    def var(self) -> float:
        if self.kind == "gaussian":
            return self.b
        if self.kind == "gamma":
            return self.a * self.b**2
        return 0.0

    def cdf(self, t):
        if self.kind == "gaussian":
            return gaussian_cdf(t, self.a, self.b)
        if self.kind == "gamma":
            return gamma_cdf(t, self.a, self.b)
        out = (np.asarray(t, dtype=float) >= self.a).astype(float)
        return float(out) if out.ndim == 0 else out

    def quantile(self, rho: float) -> float:
        if self.kind == "gaussian":
            return gaussian_quantile(self.a, self.b, rho)
        if self.kind == "gamma":
            return gamma_quantile(self.a, self.b, rho)
        _check_rho(rho)
        return self.a


# ---------------------------------------------------------------------------
# discrete PMFs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscretePmf:
    """Probability ``mass[k]`` sits at ``origin_s + k * step_s``."""

    origin_s: float
    step_s: float
    mass: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not self.step_s > 0:
            raise ValueError("step_s must be > 0")
        m = np.array(self.mass, dtype=float)
        if m.ndim != 1 or m.size == 0:
            raise ValueError("mass must be a non-empty 1-D vector")
        if np.any(m < 0):
            raise ValueError("mass entries must be >= 0")
        total = m.sum()
        if not total > 0:
            raise ValueError("mass must not be all zero")
        m /= total
        m.setflags(write=False)
        object.__setattr__(self, "mass", m)

    def __len__(self) -> int:
        return self.mass.size

    @property
    def grid(self) -> np.ndarray:
        return self.origin_s + self.step_s * np.arange(self.mass.size)

    @property
    def cdf(self) -> np.ndarray:
        # clip rounding overshoot so the CDF stays non-decreasing and ends at 1
        c = np.minimum(np.cumsum(self.mass), 1.0)
        c[-1] = 1.0
        return c

    @property
    def mean(self) -> float:
        return float(self.origin_s + self.step_s * np.dot(np.arange(self.mass.size), self.mass))

    @property
    def var(self) -> float:
        k = np.arange(self.mass.size)
        m1 = np.dot(k, self.mass)
        return float(self.step_s**2 * (np.dot(k * k, self.mass) - m1 * m1))

    def cdf_at(self, t):
        """Right-continuous step CDF evaluated at arbitrary ``t``."""
        idx = np.floor((np.asarray(t, dtype=float) - self.origin_s) / self.step_s + 1e-9).astype(int)
        c = self.cdf
        out = np.where(idx < 0, 0.0, c[np.clip(idx, 0, c.size - 1)])
        return float(out) if out.ndim == 0 else out

    def quantile(self, rho: float) -> float:
        return pmf_quantile(self, rho)

    def shifted(self, delta_s: float) -> "DiscretePmf":
        return DiscretePmf(self.origin_s + delta_s, self.step_s, self.mass)

    def trimmed(self, eps: float = 0.0) -> "DiscretePmf":
        """Drop leading/trailing cells holding at most ``eps`` mass each."""
        nz = np.flatnonzero(self.mass > eps)
        lo, hi = nz[0], nz[-1] + 1
        return DiscretePmf(self.origin_s + lo * self.step_s, self.step_s, self.mass[lo:hi])

    def to_rows(self):
        """``(t_seconds, pmf, cdf)`` triples for CSV export."""
        return zip(self.grid.tolist(), self.mass.tolist(), self.cdf.tolist())


def discretize(
    c: ComponentDist, step_s: float = DEFAULT_STEP_S, tail: float = DEFAULT_TAIL
) -> DiscretePmf:
    """Bin a component law on the ``step_s`` grid, cropping ``tail`` from each end."""
    if not step_s > 0:
        raise ValueError("step_s must be > 0")
    if not 0.0 < tail <= 1e-6:
        raise ValueError("tail must lie in (0, 1e-6]")
    if c.is_point:
        return DiscretePmf(c.a, step_s, np.ones(1))
    lo = max(0.0, c.quantile(tail))
    hi = c.quantile(1.0 - tail)
    k_lo = math.floor(lo / step_s)
    k_hi = max(math.ceil(hi / step_s), k_lo + 1)
    edges = step_s * np.arange(k_lo, k_hi + 1)
    mass = np.diff(c.cdf(edges))
    np.clip(mass, 0.0, None, out=mass)
    if not mass.sum() > 0:
        # all mass inside one cell below the float resolution of the CDF
        mass = np.zeros(k_hi - k_lo)
        mass[min(int((c.mean - k_lo * step_s) // step_s), mass.size - 1)] = 1.0
    return DiscretePmf((k_lo + 0.5) * step_s, step_s, mass)


def _same_step(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0)


def convolve(p: DiscretePmf, q: DiscretePmf) -> DiscretePmf:
    """PMF of the sum of two independent variables on a shared grid step."""
    if not _same_step(p.step_s, q.step_s):
        raise ValueError(f"grid steps differ: {p.step_s!r} vs {q.step_s!r}")
    if min(p.mass.size, q.mass.size) == 1:
        # a point mass only shifts the other operand
        single, other = (p, q) if p.mass.size == 1 else (q, p)
        return DiscretePmf(p.origin_s + q.origin_s, p.step_s, other.mass)
    if p.mass.size + q.mass.size - 1 > FFT_THRESHOLD:
        mass = fftconvolve(p.mass, q.mass)
        np.clip(mass, 0.0, None, out=mass)
    else:
        mass = np.convolve(p.mass, q.mass)
    return DiscretePmf(p.origin_s + q.origin_s, p.step_s, mass)


def convolve_all(pmfs: Iterable[DiscretePmf]) -> DiscretePmf:
    """Fold :func:`convolve` over ``pmfs``, smallest operands first."""
    items = sorted(pmfs, key=len)
    if not items:
        raise ValueError("need at least one PMF")
    acc = items[0]
    for p in items[1:]:
        acc = convolve(acc, p)
    return acc


def pmf_quantile(p: DiscretePmf, rho: float) -> float:
    """Smallest grid point whose CDF reaches ``rho``."""
    _check_rho(rho)
    k = int(np.searchsorted(p.cdf, rho, side="left"))
    return float(p.origin_s + p.step_s * min(k, p.mass.size - 1))


def total_variation(p: DiscretePmf, q: DiscretePmf) -> float:
    """Total-variation distance between PMFs on a common (possibly offset) grid."""
    if not _same_step(p.step_s, q.step_s):
        raise ValueError("grid steps differ")
    shift = (q.origin_s - p.origin_s) / p.step_s
    k = round(shift)
    if abs(shift - k) > 1e-6:
        raise ValueError("grids are not aligned")
    lo = min(0, k)
    hi = max(p.mass.size, k + q.mass.size)
    a = np.zeros(hi - lo)
    b = np.zeros(hi - lo)
    a[-lo:-lo + p.mass.size] = p.mass
    b[k - lo:k - lo + q.mass.size] = q.mass
    return 0.5 * float(np.abs(a - b).sum())
