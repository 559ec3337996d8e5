"""Degree and co-degree assumption checks, density fit and admissible motif size."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels as K
from .errors import BudgetExceeded, DegenerateDensity, InvalidArity, InvalidParameter
from .graph import Graph
from .motifs import sample_subsets

EXACT_N_LIMIT = 300
DEFAULT_SAMPLES = 1_000_000
SAMPLE_CHUNK = 1 << 16


@dataclass(frozen=True)
class Deviation:
    """Maximum of ``| common neighbours - n p^k |`` over the tuples scanned."""

    order: int
    value: float
    witness: tuple[int, ...]
    exact: bool
    tuples_scanned: int

    @property
    def lower_bound_only(self) -> bool:
        return not self.exact


def estimate_p(g: Graph) -> float:
    if g.n < 2:
        raise InvalidParameter("need at least two vertices")
    total = g.n * (g.n - 1) // 2
    m = g.edge_count
    if m == 0 or m == total:
        raise DegenerateDensity("empty or complete graph; supply p explicitly")
    return m / total


def _check_p(p: float) -> None:
    if not 0 < p < 1:
        raise InvalidParameter("p must lie in (0, 1)")


def deviation_detail(
    g: Graph,
    p: float,
    k: int,
    mode: str = "auto",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    exact_n_limit: int = EXACT_N_LIMIT,
) -> Deviation:
    """Order-``k`` deviation with its witness tuple.

    ``mode`` is ``exact``, ``sampled`` or ``auto``; auto scans exhaustively for
    ``k <= 2`` or ``n <= exact_n_limit`` and samples ``samples`` tuples otherwise.
    """
    _check_p(p)
    if k not in (1, 2, 3, 4):
        raise InvalidArity("order must be 1, 2, 3 or 4")
    n = g.n
    target = n * p**k
    if k > n:
        return Deviation(k, 0.0, (), True, 0)
    if k == 1:
        dev = np.abs(g.degrees - target)
        v = int(np.argmax(dev))
        return Deviation(1, float(dev[v]), (v,), True, n)
    if k == 2:
        best, u, v = K.max_dev_order2(g.rows, float(target))
        return Deviation(2, float(best), (int(u), int(v)), True, math.comb(n, 2))
    if mode == "auto":
        mode = "exact" if n <= exact_n_limit else "sampled"
    if mode == "exact":
        if n > exact_n_limit:
            raise BudgetExceeded(f"exact order-{k} scan limited to n <= {exact_n_limit}")
        scan = K.max_dev_order3 if k == 3 else K.max_dev_order4
        best, arg = scan(g.rows, float(target))
        return Deviation(k, float(best), tuple(int(x) for x in arg), True, math.comb(n, k))
    if mode != "sampled":
        raise InvalidParameter(f"unknown mode {mode!r}")
    if samples < 1:
        raise InvalidParameter("samples must be >= 1")
    best, witness, done, chunk = -1.0, (), 0, 0
    while done < samples:
        size = min(SAMPLE_CHUNK, samples - done)
        tuples = sample_subsets(n, k, size, np.random.default_rng([seed, chunk]))
        dev = np.abs(K.tuple_counts(g.rows, tuples) - target)
        i = int(np.argmax(dev))
        if dev[i] > best:
            best, witness = float(dev[i]), tuple(sorted(int(x) for x in tuples[i]))
        done += size
        chunk += 1
    return Deviation(k, best, witness, False, samples)


def assumption_deviation(g: Graph, p: float, k: int, mode: str = "auto", samples: int = DEFAULT_SAMPLES, seed: int = 0) -> float:
    return deviation_detail(g, p, k, mode=mode, samples=samples, seed=seed).value


def gamma_p(p: float) -> float:
    _check_p(p)
    return max(1 / p, 1 / (1 - p))


def admissible_motif_size(n: int, p: float, delta: float, C0p: float = 1.0, mode: str = "a12", base: float | None = None) -> int:
    """Largest motif size covered at deviation exponent ``delta``.

    ``floor(min(1 - delta, cap) * ln n / ln base - C0p * ln ln n)`` clipped below at 2,
    with cap 1/2 (mode ``a12``) or 2/3 (``a14``) and ``base`` defaulting to gamma_p.
    """
    _check_p(p)
    if n < 3:
        raise InvalidParameter("n must be at least 3")
    if not 0 <= delta < 1:
        raise InvalidParameter("delta must lie in [0, 1)")
    if C0p < 0:
        raise InvalidParameter("C0' must be non-negative")
    caps = {"a12": 0.5, "a14": 2.0 / 3.0}
    if mode not in caps:
        raise InvalidParameter("mode must be 'a12' or 'a14'")
    b = gamma_p(p) if base is None else base
    if b <= 1:
        raise InvalidParameter("base must exceed 1")
    val = min(1 - delta, caps[mode]) * math.log(n) / math.log(b) - C0p * math.log(math.log(n))
    return max(2, math.floor(val + 1e-12))


def delta_hat(dev: float, n: int) -> float:
    if n < 2:
        return 0.0
    return min(1.0, max(0.0, math.log(max(dev, 1.0)) / math.log(n)))


@dataclass
class Certificate:
    n: int
    p_hat: float
    p_assumed: bool
    deviations: dict[int, float]
    exact: dict[int, bool]
    witnesses: dict[int, tuple[int, ...]]
    delta_hat: dict[int, float]
    s_max_a12: int
    s_max_a14: int | None
    s_max_clique: int
    s_max_independent: int
    constants: dict[str, float] = field(default_factory=dict)

    def holds(self, C: float | None = None, delta: float | None = None, orders=None) -> bool:
        """True iff every requested order deviates by at most ``C n^delta``."""
        C = self.constants["C"] if C is None else C
        orders = sorted(self.deviations) if orders is None else orders
        if delta is None:
            delta = max(self.delta_hat[k] for k in orders)
        limit = C * self.n**delta
        return all(self.deviations[k] <= limit for k in orders)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("deviations", "exact", "witnesses", "delta_hat"):
            d[key] = {str(k): (list(v) if isinstance(v, tuple) else v) for k, v in d[key].items()}
        return d


def certify(
    g: Graph,
    p: float | None = None,
    C: float = 3.0,
    C0p: float = 1.0,
    orders=(1, 2, 3, 4),
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    exact_n_limit: int = EXACT_N_LIMIT,
) -> Certificate:
    """Fit or accept ``p``, scan the requested orders and derive the motif-size bounds."""
    if g.n < 1:
        raise InvalidParameter("graph must be nonempty")
    assumed = p is not None
    if p is None:
        p = estimate_p(g)
    _check_p(p)
    devs, exact, wit, dh = {}, {}, {}, {}
    for k in orders:
        d = deviation_detail(g, p, k, samples=samples, seed=seed, exact_n_limit=exact_n_limit)
        devs[k], exact[k], wit[k] = d.value, d.exact, d.witness
        dh[k] = delta_hat(d.value, g.n)

    def smax(used, mode, base=None):
        used = [k for k in used if k in dh]
        if not used or g.n < 3:
            return 2
        delta = max(dh[k] for k in used)
        if delta >= 1:
            return 2
        return admissible_motif_size(g.n, p, delta, C0p, mode, base)

    low = [k for k in (1, 2) if k in dh]
    full = all(k in dh for k in (1, 2, 3, 4))
    return Certificate(
        n=g.n,
        p_hat=p,
        p_assumed=assumed,
        deviations=devs,
        exact=exact,
        witnesses=wit,
        delta_hat=dh,
        s_max_a12=smax(low, "a12"),
        s_max_a14=smax((1, 2, 3, 4), "a14") if full else None,
        s_max_clique=smax(low, "a12", 1 / p),
        s_max_independent=smax(low, "a12", 1 / (1 - p)),
        constants={"C": C, "C0p": C0p},
    )
