"""Finite-n checks of the counting machinery: good vertex sets, averaged generalized
co-degrees, good chains, the census error functional and its recursion bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from . import _kernels as K
from .errors import BudgetExceeded, InvalidParameter, PreconditionFailed
from .graph import Graph, VertexTuple, _full_mask, _set_to_bits, _sign_row, common_mask
from .motifs import (
    DEFAULT_BUDGET,
    _classes,
    count_induced_exact,
    count_induced_sampled,
    n_pairs,
    signed_rows,
)


@dataclass(frozen=True)
class GoodSetParams:
    C_tilde: float
    epsilon: float
    delta: float
    p: float

    def __post_init__(self):
        if self.C_tilde <= 0:
            raise InvalidParameter("C_tilde must be positive")
        if not 0 < self.epsilon < 1:
            raise InvalidParameter("epsilon must lie in (0, 1)")
        if not 0 <= self.p <= 1:
            raise InvalidParameter("p must lie in [0, 1]")

    @classmethod
    def default(cls, n: int, delta: float, p: float, C_tilde: float = 3.0, C0_bar: float = 4.0) -> "GoodSetParams":
        """``epsilon = C0_bar ln ln n / ((1 - delta) ln n)``, capped just below 1."""
        if n < 3:
            raise InvalidParameter("n must be at least 3")
        if not 0 <= delta < 1:
            raise InvalidParameter("delta must lie in [0, 1)")
        eps = C0_bar * math.log(math.log(n)) / ((1 - delta) * math.log(n))
        return cls(C_tilde, min(max(eps, 1e-9), 0.999), delta, p)

    def shrink(self, n: int) -> float:
        """``n^{epsilon (delta - 1) / 2}``."""
        return n ** (self.epsilon * (self.delta - 1) / 2)

    def weight(self, xi: int) -> float:
        return self.p if xi == 1 else 1 - self.p

    def threshold(self, n: int, b_size: int, xi: int) -> float:
        t = self.C_tilde * b_size * self.weight(xi) * self.shrink(n)
        if t <= 0:
            raise InvalidParameter("threshold must be positive; check p and |B|")
        return t


def _neighbourhood_counts(g: Graph, mask: np.ndarray, xi: int) -> np.ndarray:
    """``|N_v^xi ∩ B|`` for every v, with ``B`` given as a bitset."""
    rows = signed_rows(g)[g.n * xi : g.n * (xi + 1)]
    return np.bitwise_count(rows & mask[None, :]).sum(axis=1).astype(np.int64)


def good_set_mask(g: Graph, B_mask: np.ndarray, xi: int, params: GoodSetParams) -> np.ndarray:
    size = int(np.bitwise_count(B_mask).sum())
    if size == 0:
        raise InvalidParameter("B must be nonempty")
    counts = _neighbourhood_counts(g, B_mask, xi)
    target = size * params.weight(xi)
    return np.abs(counts - target) <= params.threshold(g.n, size, xi)


def good_set(g: Graph, B, xi: int, params: GoodSetParams) -> set[int]:
    """Vertices whose sign-``xi`` neighbourhood in ``B`` is within the threshold of ``|B| p^xi q^(1-xi)``."""
    if xi not in (0, 1):
        raise InvalidParameter("sign must be 0 or 1")
    ok = good_set_mask(g, _set_to_bits(B, g.n), xi, params)
    return set(np.flatnonzero(ok).tolist())


# averaged generalized co-degrees ----------------------------------------------------


def f_bar(g: Graph, r: int, xi, convention: str = "all_tuples", budget: int = 250_000) -> Fraction:
    """Average of ``f_r`` normalized by ``(n)_r``.

    ``all_tuples`` evaluates ``sum_w deg0(w)^z deg1(w)^(r-z) / (n)_r`` (z zeros in
    xi), which equals the with-repetition tuple sum divided by ``(n)_r``.
    ``distinct_tuples`` averages ``f_r`` over ordered tuples of distinct vertices.
    """
    xi = tuple(int(x) for x in xi)
    if r < 1 or len(xi) != r or any(x not in (0, 1) for x in xi):
        raise InvalidParameter("xi must be a 0/1 vector of length r >= 1")
    n = g.n
    falling = math.perm(n, r)
    if falling == 0:
        raise InvalidParameter("r exceeds n")
    if convention == "all_tuples":
        z = r - sum(xi)
        d1 = [int(x) for x in g.degrees]
        total = sum((n - 1 - d) ** z * d ** (r - z) for d in d1)
        return Fraction(total, falling)
    if convention == "distinct_tuples":
        if falling > budget:
            raise BudgetExceeded(f"(n)_r = {falling} tuples exceeds budget {budget}")
        tuples = np.array(list(permutations(range(n), r)), dtype=np.int64).reshape(-1, r)
        idx = tuples + n * np.asarray(xi, dtype=np.int64)[None, :]
        total = int(K.tuple_counts(signed_rows(g), np.ascontiguousarray(idx)).sum())
        return Fraction(total, falling)
    raise InvalidParameter(f"unknown convention {convention!r}")


# good chains --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainEstimate:
    f_r: int
    expected: float
    bound: float
    holds: bool


def _check_chain(g: Graph, chain: VertexTuple, params: GoodSetParams) -> None:
    full = _full_mask(g.n)
    B = full.copy()
    for j, (v, s) in enumerate(zip(chain.vertices, chain.signs), start=1):
        if j >= 3:
            size = int(np.bitwise_count(B).sum())
            if size == 0:
                raise PreconditionFailed(f"chain prefix before position {j} has empty common neighbourhood", index=j)
            counts = _neighbourhood_counts(g, B, s)
            target = size * params.weight(s)
            if abs(int(counts[v]) - target) > params.threshold(g.n, size, s):
                raise PreconditionFailed(f"vertex {v} at position {j} is not good for its prefix", index=j)
        B = B & _sign_row(g, v, s)


def good_chain_estimate(g: Graph, chain: VertexTuple, params: GoodSetParams) -> ChainEstimate:
    """Compare ``f_r`` of a good chain with ``n p^ones q^zeros`` and the ``3 C~ r n^{eps(delta-1)/2}`` relative bound.

    Raises :class:`PreconditionFailed` (1-based ``index``) when some vertex at
    position >= 3 is not good for the common neighbourhood of its prefix.
    """
    _check_chain(g, chain, params)
    r = len(chain)
    ones = sum(chain.signs)
    expected = g.n * params.p**ones * (1 - params.p) ** (r - ones)
    f = int(np.bitwise_count(common_mask(g, chain)).sum())
    bound = 3 * params.C_tilde * r * params.shrink(g.n) * expected
    return ChainEstimate(f, expected, bound, abs(f - expected) <= bound)


def build_good_chain(g: Graph, r: int, xi, params: GoodSetParams, seed: int) -> VertexTuple:
    """Greedy chain: two random vertices, then each next vertex drawn from the good set of its prefix."""
    xi = tuple(int(x) for x in xi)
    if len(xi) != r or r < 1 or r > g.n:
        raise InvalidParameter("xi must have length r with 1 <= r <= n")
    rng = np.random.default_rng([seed, r])
    chosen: list[int] = []
    B = _full_mask(g.n).copy()
    for j in range(r):
        used = np.zeros(g.n, dtype=bool)
        used[chosen] = True
        if j < 2:
            cand = np.flatnonzero(~used)
        else:
            if not np.bitwise_count(B).sum():
                raise PreconditionFailed("prefix common neighbourhood is empty", index=j + 1)
            cand = np.flatnonzero(good_set_mask(g, B, xi[j], params) & ~used)
        if cand.size == 0:
            raise PreconditionFailed(f"no good vertex available at position {j + 1}", index=j + 1)
        v = int(rng.choice(cand))
        chosen.append(v)
        B = B & _sign_row(g, v, xi[j])
    return VertexTuple(tuple(chosen), xi)


# census error functional ---------------------------------------------------------------


def error_functional(
    g: Graph,
    r: int,
    p: float,
    mode: str = "exact",
    samples: int = 200_000,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """``max_H | n_G(H) |Aut H| / (n)_r - p^e(H) q^(C(r,2) - e(H)) |`` over classes on r vertices."""
    if not 0 < p < 1:
        raise InvalidParameter("p must lie in (0, 1)")
    if mode == "exact":
        counts = {c: float(v) for c, v in count_induced_exact(g, r, budget=budget).items()}
    elif mode == "sampled":
        counts = {c: v[0] for c, v in count_induced_sampled(g, r, samples, seed).items()}
    else:
        raise InvalidParameter(f"unknown mode {mode!r}")
    falling = math.perm(g.n, r)
    M = n_pairs(r)
    worst = 0.0
    for m in _classes(r):
        target = p**m.edge_count * (1 - p) ** (M - m.edge_count)
        worst = max(worst, abs(counts[m.canon] * m.aut_size / falling - target))
    return worst


def recursion_bound(E_r: float, r: int, n: int, C_star: float, p: float = 0.5) -> float:
    """``E_r 2^-r (1 + C* r / (log2 n)^3) + C* r / (log2 n)^3 * 2^-C(r+1,2)``."""
    if r < 2 or n < 4:
        raise InvalidParameter("need r >= 2 and n >= 4")
    if p != 0.5:
        raise InvalidParameter("the recursion bound is stated for p = 1/2")
    if E_r < 0 or C_star < 0:
        raise InvalidParameter("E_r and C_star must be non-negative")
    eta = C_star * r / math.log2(n) ** 3
    return E_r * 0.5**r * (1 + eta) + eta * 0.5 ** n_pairs(r + 1)


def recursion_closed_form(E_2: float, s: int, n: int, C_star: float) -> float:
    """Accumulated form ``2 E_2 2^-C(s,2) + 2 C* / (log2 n)^2 * 2^-C(s,2)``."""
    if s < 2 or n < 4:
        raise InvalidParameter("need s >= 2 and n >= 4")
    w = 0.5 ** n_pairs(s)
    return 2 * E_2 * w + 2 * C_star / math.log2(n) ** 2 * w


@dataclass
class DiagReport:
    n: int
    p: float
    E_n: list[tuple[int, float]]
    recursion_bounds: list[tuple[int, float]]
    good_fraction: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "E_n": [{"r": r, "value": v} for r, v in self.E_n],
            "recursion_bounds": [{"r": r, "bound": b} for r, b in self.recursion_bounds],
            "good_fraction": self.good_fraction,
        }


def diagnose(g: Graph, p: float, r_max: int = 4, C_star: float = 32.0, delta: float = 0.5, C_tilde: float = 3.0, budget: int = DEFAULT_BUDGET) -> DiagReport:
    """Error functional for r = 2..r_max, recursion bounds from each observed value, and the good fraction for B = [n]."""
    E = [(r, error_functional(g, r, p, budget=budget)) for r in range(2, r_max + 1)]
    bounds = [(r + 1, recursion_bound(v, r, g.n, C_star)) for r, v in E if r < r_max] if p == 0.5 and g.n >= 4 else []
    params = GoodSetParams.default(max(g.n, 3), delta, p, C_tilde)
    good = good_set_mask(g, _full_mask(g.n).copy(), 1, params)
    return DiagReport(g.n, p, E, bounds, float(good.mean()))
