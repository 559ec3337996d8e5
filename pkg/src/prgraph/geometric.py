"""Numerics for spherical geometric graphs and bivariate normal tails."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .errors import InvalidParameter, PreconditionFailed

_STD = NormalDist()
_TINY = 1e-300


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def normal_quantile(u: float) -> float:
    if not 0 < u < 1:
        raise InvalidParameter("quantile argument must lie in (0, 1)")
    return _STD.inv_cdf(u)


# regularized incomplete beta ---------------------------------------------------


def _betacf(x: float, a: float, b: float, max_iter: int = 100_000, eps: float = 1e-15) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def incomplete_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise InvalidParameter("shape parameters must be positive")
    if not 0 <= x <= 1:
        raise InvalidParameter("x must lie in [0, 1]")
    if x == 0 or x == 1:
        return float(x)
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(x, a, b) / a
    return 1.0 - front * _betacf(1.0 - x, b, a) / b


def beta_quantile(q: float, a: float, b: float, tol: float = 1e-12) -> float:
    """Inverse of :func:`incomplete_beta` in x, by bisection to relative width ``1e-3 tol``."""
    if not 0 <= q <= 1:
        raise InvalidParameter("q must lie in [0, 1]")
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    if q == 0:
        return 0.0
    if q == 1:
        return 1.0
    lo, hi = 0.0, 1.0
    # relative stopping width: near x = 0 the quantile can be far below tol
    for _ in range(1100):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if incomplete_beta(mid, a, b) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-3 * tol * hi:
            break
    return 0.5 * (lo + hi)


# thresholds ------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdSpec:
    p: float
    d: int
    t: float


def _check_pd(p: float, d: int) -> None:
    if not 0 < p <= 0.5:
        raise InvalidParameter("p must lie in (0, 1/2]")
    if d < 2:
        raise InvalidParameter("dimension must be at least 2")


def threshold_tpd(p: float, d: int) -> ThresholdSpec:
    """``t`` with ``P(<X, Y> >= t) = p`` for independent uniform points on S^{d-1}.

    The inner product T is distributed like one coordinate of a uniform point,
    with ``T^2 ~ Beta(1/2, (d-1)/2)`` and T symmetric, so
    ``t = sqrt(BetaQuantile(1 - 2p))``.
    """
    _check_pd(p, d)
    if p == 0.5:
        return ThresholdSpec(p, d, 0.0)
    return ThresholdSpec(p, d, math.sqrt(beta_quantile(1.0 - 2.0 * p, 0.5, (d - 1) / 2.0)))


def dglu_gap(p: float, d: int) -> float:
    """``|t_{p,d} sqrt(d) - Phi^{-1}(1-p)|``."""
    _check_pd(p, d)
    return abs(threshold_tpd(p, d).t * math.sqrt(d) - normal_quantile(1.0 - p))


def dglu_min_constant(p: float, d: int) -> float:
    """Smallest constant for which the asymptotic threshold bound holds at ``(p, d)``."""
    return dglu_gap(p, d) / math.sqrt(math.log(d) / d)


def dglu_check(p: float, d: int, kappa: float = 5.0) -> bool:
    """Whether ``|t sqrt(d) - Phi^{-1}(1-p)| <= kappa sqrt(ln d / d)``; needs d >= max(4/p^2, 27)."""
    _check_pd(p, d)
    need = max(4.0 / p**2, 27.0)
    if d < need:
        raise PreconditionFailed(f"d = {d} below the required max(4/p^2, 27) = {need:.4g}")
    return dglu_gap(p, d) <= kappa * math.sqrt(math.log(d) / d)


def tau_n(n: int, d: int, p: float, kappa_p: float = 10.0) -> float:
    """``kappa_p (sqrt(max(ln n, ln d) / d) + 1/n^2)``."""
    if n < 2 or d < 2:
        raise InvalidParameter("n and d must be at least 2")
    if kappa_p <= 0:
        raise InvalidParameter("kappa_p must be positive")
    if not 0 < p <= 0.5:
        raise InvalidParameter("p must lie in (0, 1/2]")
    return kappa_p * (math.sqrt(max(math.log(n), math.log(d)) / d) + 1.0 / n**2)


# bivariate normal tails -----------------------------------------------------------------


def willink_bounds(h: float, rho: float) -> tuple[float, float]:
    """Bracket ``[Phi(-h)Phi(-theta h), (1+rho)Phi(-h)Phi(-theta h)]`` for P(Z >= h, Z_rho >= h).

    ``theta = sqrt((1-rho)/(1+rho))``; valid for ``h > 0`` and ``0 <= rho < 1``.
    """
    if not h > 0:
        raise InvalidParameter("h must be positive")
    if not 0 <= rho < 1:
        raise InvalidParameter("rho must lie in [0, 1)")
    theta = math.sqrt((1 - rho) / (1 + rho))
    base = normal_sf(h) * normal_sf(theta * h)
    return base, (1 + rho) * base


def reflect_negative_rho(h: float, rho: float, tail) -> float:
    """``2 Phi(-h) Phi(-theta h) - tail(theta h, -rho)`` for ``-1 < rho < 0``.

    ``tail(k, r)`` must evaluate ``P(Z >= k, Z_r >= k)`` at the positive
    correlation ``r = -rho``; the result is the tail at ``(h, rho)``.
    """
    if not -1 < rho < 0:
        raise InvalidParameter("rho must lie in (-1, 0)")
    theta = math.sqrt((1 - rho) / (1 + rho))
    return 2 * normal_sf(h) * normal_sf(theta * h) - tail(theta * h, -rho)


def willink_bounds_negative(h: float, rho: float) -> tuple[float, float]:
    """Bracket for ``-1 < rho < 0``: ``[(1+rho) B, B]`` with ``B = Phi(-h)Phi(-theta h)``.

    Obtained by applying :func:`willink_bounds` inside :func:`reflect_negative_rho`.
    """
    if not h > 0:
        raise InvalidParameter("h must be positive")
    if not -1 < rho < 0:
        raise InvalidParameter("rho must lie in (-1, 0)")
    theta = math.sqrt((1 - rho) / (1 + rho))
    lo_in, hi_in = willink_bounds(theta * h, -rho)
    outer = 2 * normal_sf(h) * normal_sf(theta * h)
    return outer - hi_in, outer - lo_in


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    samples: int


MC_CHUNK = 1 << 18


def bivariate_tail_mc(h: float, rho: float, samples: int, seed: int) -> McEstimate:
    """Monte Carlo ``P(Z >= h, rho Z + sqrt(1-rho^2) Z' >= h)``."""
    if samples < 1000:
        raise InvalidParameter("need at least 1000 samples")
    if not -1 < rho < 1:
        raise InvalidParameter("rho must lie in (-1, 1)")
    hits, done, chunk = 0, 0, 0
    s = math.sqrt(1 - rho * rho)
    while done < samples:
        size = min(MC_CHUNK, samples - done)
        rng = np.random.default_rng([seed, chunk])
        z = rng.standard_normal(size)
        w = rng.standard_normal(size)
        hits += int(np.count_nonzero((z >= h) & (rho * z + s * w >= h)))
        done += size
        chunk += 1
    f = hits / samples
    return McEstimate(f, math.sqrt(f * (1 - f) / samples), samples)


def edge_probability_mc(p: float, d: int, pairs: int, seed: int, t: float | None = None) -> McEstimate:
    """Monte Carlo ``P(<X, Y> >= t_{p,d})``.

    By rotational invariance ``<X, Y>`` has the law of ``Z_1 / ||Z||``;
    ``||Z||^2 = Z_1^2 + chi^2_{d-1}`` is drawn directly.
    """
    if t is None:
        t = threshold_tpd(p, d).t
    if pairs < 1:
        raise InvalidParameter("pairs must be positive")
    hits, done, chunk = 0, 0, 0
    while done < pairs:
        size = min(MC_CHUNK, pairs - done)
        rng = np.random.default_rng([seed, chunk])
        z1 = rng.standard_normal(size)
        rest = rng.chisquare(d - 1, size)
        hits += int(np.count_nonzero(z1 / np.sqrt(z1 * z1 + rest) >= t))
        done += size
        chunk += 1
    f = hits / pairs
    return McEstimate(f, math.sqrt(f * (1 - f) / pairs), pairs)


@dataclass(frozen=True)
class NormCheck:
    passed: bool
    failure_rate: float
    allowed: float
    samples: int
    warning: str | None = None


def gaussian_norm_check(d: int, samples: int, seed: int, eps: float = 3.0) -> NormCheck:
    """Empirical check that ``| ||Z|| - sqrt(d) | > eps + 1/(2 sqrt d)`` happens with rate at most ``2 e^{-eps^2/2}``.

    ``||Z||^2`` is drawn as chi-square with d degrees of freedom. The allowed
    rate adds five binomial standard errors at the bound.
    """
    if d < 2:
        raise InvalidParameter("d must be at least 2")
    bound = min(1.0, 2 * math.exp(-eps * eps / 2))
    if samples <= 0:
        return NormCheck(True, 0.0, bound, 0, "no samples drawn; check is vacuous")
    rng = np.random.default_rng([seed, 0])
    r = np.sqrt(rng.chisquare(d, samples))
    fail = float(np.mean(np.abs(r - math.sqrt(d)) > eps + 1 / (2 * math.sqrt(d))))
    allowed = bound + 5 * math.sqrt(bound * (1 - bound) / samples)
    return NormCheck(fail <= allowed, fail, allowed, samples)


# validation battery --------------------------------------------------------------------


def validation_battery(seed: int = 0, mc_samples: int = 200_000, kappa: float = 5.0) -> dict:
    """Run the numeric self-checks and return a JSON-ready summary."""
    out: dict = {"checks": []}

    def add(name, ok, **info):
        out["checks"].append({"name": name, "pass": bool(ok), **info})

    add("normal_cdf(0)", normal_cdf(0.0) == 0.5)
    x = 1.7
    add("quantile inverts cdf", abs(normal_quantile(normal_cdf(x)) - x) <= 1e-8)
    add("t(1/2, d) = 0", all(threshold_tpd(0.5, d).t == 0.0 for d in (2, 10, 1000)))
    add("t(1/4, 3) = 1/2", abs(threshold_tpd(0.25, 3).t - 0.5) <= 1e-10, t=threshold_tpd(0.25, 3).t)
    for d in (100, 1000, 10000):
        add(f"threshold bound p=0.3 d={d}", dglu_check(0.3, d, kappa), min_constant=dglu_min_constant(0.3, d))
    for i, (p, d) in enumerate(((0.1, 50), (0.3, 500), (0.5, 10))):
        est = edge_probability_mc(p, d, mc_samples, seed + i)
        add(f"edge probability p={p} d={d}", abs(est.estimate - p) <= 5 * math.sqrt(p * (1 - p) / mc_samples), estimate=est.estimate)
    for i, h in enumerate((0.5, 1.0, 2.0)):
        for j, rho in enumerate((0.0, 0.3, 0.8)):
            lo, hi = willink_bounds(h, rho)
            est = bivariate_tail_mc(h, rho, mc_samples, seed + 10 * i + j)
            slack = 5 * max(est.stderr, 1 / mc_samples)
            add(f"bivariate bracket h={h} rho={rho}", lo - slack <= est.estimate <= hi + slack, lower=lo, upper=hi, estimate=est.estimate)
    nc = gaussian_norm_check(10_000, mc_samples, seed)
    add("gaussian norm concentration d=10000", nc.passed, failure_rate=nc.failure_rate)
    out["all_pass"] = all(c["pass"] for c in out["checks"])
    return out
