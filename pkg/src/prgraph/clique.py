"""Poisson approximation for clique counts in G(n, 1/2), in natural-log space.

``a_s = C(r,s) C(n-r, r-s) 2^{-(C(r,2) - C(s,2))}`` is the overlap term for two
r-cliques sharing s vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter

LN2 = math.log(2.0)


_DIRECT_LIMIT = 4096


def log_comb(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    k = min(k, n - k)
    if k <= _DIRECT_LIMIT:
        # lgamma differences lose ~1e-9 absolute at n ~ 1e6; a direct sum keeps ratios exact
        return math.fsum(math.log(n - k + i) - math.log(i) for i in range(1, k + 1))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _pairs(k: int) -> int:
    return k * (k - 1) // 2


def poisson_mu(n: int, r: int) -> float:
    """``ln mu`` with ``mu = C(n, r) 2^{-C(r,2)}``, the expected number of r-cliques."""
    if not 2 <= r <= n:
        raise InvalidParameter("need 2 <= r <= n")
    return log_comb(n, r) - _pairs(r) * LN2


def overlap_term(n: int, r: int, s: int) -> float:
    """``ln a_s``."""
    if not 2 <= s <= r - 1:
        raise InvalidParameter("need 2 <= s <= r - 1")
    if r - s > n - r:
        raise InvalidParameter("need r - s <= n - r")
    return _a_log(n, r, s)


def consecutive_ratio(n: int, r: int, s: int) -> float:
    """``rho_s = a_{s+1} / a_s = (r-s)^2 2^s / ((s+1)(n-2r+s+1))``."""
    if not 0 <= s < r:
        raise InvalidParameter("need 0 <= s < r")
    den = (s + 1) * (n - 2 * r + s + 1)
    if den <= 0:
        raise InvalidParameter("need n - 2r + s + 1 > 0")
    val = 2 * math.log(r - s) + s * LN2 - math.log(den)
    return math.exp(val) if val < 709 else math.inf


def _logsumexp(xs) -> float:
    xs = [x for x in xs if x != -math.inf]
    if not xs:
        return -math.inf
    m = max(xs)
    return m + math.log(sum(math.exp(x - m) for x in xs))


@dataclass
class CliqueRegime:
    n: int
    r: int
    mu_log: float
    a_s_log: list[float]
    tv_bound: float

    def to_dict(self) -> dict:
        return {"n": self.n, "r": self.r, "mu_log": self.mu_log, "a_s_log": self.a_s_log, "tv_bound": self.tv_bound}


@dataclass
class VarianceBound:
    full_log: float
    refined_log: float

    @property
    def full(self) -> float:
        return math.exp(self.full_log) if self.full_log < 709 else math.inf

    @property
    def refined(self) -> float:
        return math.exp(self.refined_log) if self.refined_log < 709 else math.inf


def _a_log(n: int, r: int, s: int) -> float:
    # zero (log -inf) when two r-sets cannot share exactly s vertices
    return log_comb(r, s) + log_comb(n - r, r - s) - (_pairs(r) - _pairs(s)) * LN2


def _log_comb_row(N: int, m: int) -> np.ndarray:
    """``ln C(N, j)`` for ``j = 0..m`` by cumulative sums; ``-inf`` where ``j > N``."""
    j = np.arange(1, m + 1, dtype=np.float64)
    top = N - j + 1
    with np.errstate(divide="ignore", invalid="ignore"):
        steps = np.where(top > 0, np.log(np.maximum(top, 1.0)) - np.log(j), -np.inf)
    return np.concatenate(([0.0], np.cumsum(steps)))


def _a_logs(n: int, r: int) -> list[float]:
    if r < 3:
        return []
    s = np.arange(2, r)
    lr = _log_comb_row(r, r)
    ln = _log_comb_row(n - r, r)
    pairs = (r * (r - 1) - s * (s - 1)) // 2
    vals = lr[s] + ln[r - s] - pairs * LN2
    return [float(v) for v in vals]


def variance_ratio_bound(n: int, r: int) -> VarianceBound:
    """Upper bounds on ``Var/mu - 1 + 2 * 2^{-C(r,2)}``.

    ``full`` is ``2^{-C(r,2)} + sum_{s=2}^{r-1} a_s``. ``refined`` replaces the sum
    by ``r * max a_s`` over ``s in {2, r-3, r-2, r-1}``.
    """
    if not 2 <= r <= n:
        raise InvalidParameter("need 2 <= r <= n")
    head = -_pairs(r) * LN2
    logs = _a_logs(n, r)
    full = _logsumexp([head, *logs])
    picks = sorted({s for s in (2, r - 3, r - 2, r - 1) if 2 <= s <= r - 1})
    if picks:
        refined = _logsumexp([head, math.log(r) + max(_a_log(n, r, s) for s in picks)])
    else:
        refined = head
    return VarianceBound(full, refined)


def tv_bound(n: int, r: int) -> float:
    """``(1 - e^{-mu}) (2^{-C(r,2)} + sum a_s)`` bounding the distance to Poisson(mu)."""
    mu_log = poisson_mu(n, r)
    factor = -math.expm1(-math.exp(mu_log)) if mu_log < 700 else 1.0
    vb = variance_ratio_bound(n, r)
    if factor == 0.0:
        return 0.0
    val = math.log(factor) + vb.full_log
    return math.exp(val) if val < 709 else math.inf


def clique_regime(n: int, r: int) -> CliqueRegime:
    return CliqueRegime(n, r, poisson_mu(n, r), _a_logs(n, r), tv_bound(n, r))


@dataclass
class UnimodalityProfile:
    n: int
    r: int
    s_star: int | None
    a_s_log: list[float]
    violations: list[int] = field(default_factory=list)
    allowed_violations: list[int] = field(default_factory=list)

    @property
    def decreasing_then_increasing(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "s_star": self.s_star,
            "decreasing_then_increasing": self.decreasing_then_increasing,
            "violations": self.violations,
            "allowed_violations": self.allowed_violations,
        }


def unimodality_profile(n: int, r: int) -> UnimodalityProfile:
    """Locate ``s* = argmin a_s`` and test the sign of ``ln rho_s`` on both sides.

    Expect ``rho_s < 1`` for ``2 <= s < s*`` and ``rho_s > 1`` for ``s* <= s <= r-2``.
    Failures at ``s in {r-3, r-2}`` are listed separately as allowed.
    """
    if r < 3 or 4 * r > n:
        raise InvalidParameter("need 3 <= r <= n/4")
    logs = _a_logs(n, r)
    s_star = 2 + int(np.argmin(logs))
    bad, allowed = [], []
    for s in range(2, r - 1):
        up = logs[s - 1] - logs[s - 2] > 0
        ok = (not up) if s < s_star else up
        if not ok:
            (allowed if s in (r - 3, r - 2) else bad).append(s)
    return UnimodalityProfile(n, r, s_star, logs, bad, allowed)


# planted-clique experiment --------------------------------------------------------------


@dataclass
class PlantedSeedResult:
    seed: int
    clique_size: int
    deg_dev: float
    codeg_dev: float
    limit: float
    passed: bool


@dataclass
class PlantedReport:
    n: int
    epsilon: float
    c: float
    delta: float
    C: float
    r: int
    results: list[PlantedSeedResult]
    label: str = "planted surrogate"

    @property
    def pass_rate(self) -> float:
        return sum(x.passed for x in self.results) / len(self.results)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "epsilon": self.epsilon,
            "c": self.c,
            "delta": self.delta,
            "C": self.C,
            "r": self.r,
            "pass_rate": self.pass_rate,
            "seeds": [x.__dict__ for x in self.results],
        }


def planted_clique_size(n: int, epsilon: float, c: float) -> int:
    return math.ceil(c * n ** (0.5 - epsilon))


def planted_certification_experiment(n: int, epsilon: float, c: float, seeds, delta: float = 0.62, C: float = 3.0) -> PlantedReport:
    """ER(n, 1/2) with a planted ``ceil(c n^{1/2 - epsilon})``-clique, checked at orders 1 and 2.

    A seed passes when both deviations are at most ``C n^delta``.
    """
    from .certifier import deviation_detail
    from .generators import derive_seed, gen_er, plant_clique

    if delta + epsilon <= 1:
        raise InvalidParameter("the check level must satisfy delta + epsilon > 1")
    if not 0 < epsilon < 0.5 or c < 0 or not 0 <= delta < 1:
        raise InvalidParameter("need 0 < epsilon < 1/2, c >= 0, 0 <= delta < 1")
    seeds = list(seeds)
    if not seeds:
        raise InvalidParameter("need at least one seed")
    r = planted_clique_size(n, epsilon, c)
    if r > n:
        raise InvalidParameter("clique size exceeds n")
    limit = C * n**delta
    out = []
    for s in seeds:
        g = gen_er(n, 0.5, s)
        if r >= 2:
            g = plant_clique(g, r, derive_seed(s, 1))
        d1 = deviation_detail(g, 0.5, 1).value
        d2 = deviation_detail(g, 0.5, 2).value
        out.append(PlantedSeedResult(s, r, d1, d2, limit, d1 <= limit and d2 <= limit))
    return PlantedReport(n, epsilon, c, delta, C, r, out)
