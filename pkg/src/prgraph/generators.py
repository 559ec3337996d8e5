"""Graph families: Erdős–Rényi, switch-chain regular, GF(2) binary graph, planted clique,
spherical geometric and edge-triangle ERGM.

Every generator is a deterministic function of its parameters and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .errors import InvalidParameter, SizeUnsupported
from .graph import Graph, pack_dense, pack_rows

MAX_BINARY_K = 17


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _seed_int(seed) -> int:
    if isinstance(seed, (int, np.integer)) and not isinstance(seed, bool):
        if seed < 0:
            raise InvalidParameter("seed must be non-negative")
        return int(seed)
    raise InvalidParameter("seed must be a non-negative integer")


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit child seed for a sub-stream labelled by ``keys``."""
    return int(np.random.SeedSequence([_seed_int(seed), *keys]).generate_state(1, np.uint64)[0])


# Erdős–Rényi ---------------------------------------------------------------


def er_dense(n: int, p: float, seed: int) -> np.ndarray:
    if not 0 <= p <= 1:
        raise InvalidParameter("p must lie in [0, 1]")
    if n < 1:
        raise InvalidParameter("n must be positive")
    rng = _rng(_seed_int(seed))
    A = np.zeros((n, n), dtype=bool)
    block = max(1, (1 << 22) // max(n, 1))
    for start in range(0, n, block):
        stop = min(n, start + block)
        u = rng.random((stop - start, n))
        A[start:stop] = u < p
    A = np.triu(A, 1)
    return A | A.T


def gen_er(n: int, p: float, seed: int) -> Graph:
    """G(n, p): pair ``u < v`` is an edge iff its Philox uniform is below ``p``."""
    return Graph(n, pack_dense(er_dense(n, p, seed)))


# random regular --------------------------------------------------------------


def circulant(n: int, d: int) -> np.ndarray:
    A = np.zeros((n, n), dtype=np.uint8)
    idx = np.arange(n)
    for off in range(1, d // 2 + 1):
        A[idx, (idx + off) % n] = 1
        A[(idx + off) % n, idx] = 1
    if d % 2:
        A[idx, (idx + n // 2) % n] = 1
    return A


def gen_regular_switch(n: int, d: int, switches: int | None = None, seed: int = 0) -> Graph:
    """d-regular graph from a circulant start and ``switches`` proposed double-edge switches.

    Each proposal picks two edges uniformly with a random orientation and rewires
    ``(a,b),(c,d) -> (a,d),(c,b)``; proposals creating a loop or multi-edge are
    rejected and count toward the total. Default total is ``10 n d``.
    """
    if n < 1 or d < 0 or d >= n:
        raise InvalidParameter("need 0 <= d < n")
    if (n * d) % 2:
        raise InvalidParameter("n * d must be even")
    switches = 10 * n * d if switches is None else switches
    if switches < 0:
        raise InvalidParameter("switch count must be non-negative")
    A = circulant(n, d)
    iu, ju = np.nonzero(np.triu(A, 1))
    edges = np.stack([iu, ju], axis=1).astype(np.int64)
    m = edges.shape[0]
    rng = _rng(_seed_int(seed))
    done = 0
    chunk = 1 << 20
    while done < switches and m >= 2:
        size = min(chunk, switches - done)
        K.switch_steps(A, edges, rng.integers(0, m, size), rng.integers(0, m, size), rng.integers(0, 2, size).astype(np.bool_))
        done += size
    return Graph(n, pack_dense(A.astype(bool)))


# GF(2) binary graph -----------------------------------------------------------


@dataclass(frozen=True)
class BinaryGraphSpec:
    k: int
    n: int
    d: int
    codegree_adjacent: int
    codegree_nonadjacent: int

    @classmethod
    def from_k(cls, k: int) -> "BinaryGraphSpec":
        _check_binary_k(k)
        return cls(k, 2 ** (k - 1) - 1, 2 ** (k - 2) - 2, 2 ** (k - 3) - 3, 2 ** (k - 3) - 1)


def _check_binary_k(k: int) -> None:
    if not isinstance(k, (int, np.integer)) or k < 3 or k % 2 == 0:
        raise InvalidParameter("k must be an odd integer >= 3")
    if k > 25:
        raise InvalidParameter("k must be at most 25")


def binary_vertices(k: int) -> np.ndarray:
    """Odd-weight k-bit vectors other than all-ones, in increasing integer order."""
    _check_binary_k(k)
    v = np.arange(1 << k, dtype=np.int64)
    odd = (np.bitwise_count(v) & 1) == 1
    odd[(1 << k) - 1] = False
    return v[odd]


def gen_binary(k: int) -> Graph:
    """Vertices are odd-weight non-all-ones vectors in GF(2)^k; u ~ v iff <u, v> = 1."""
    _check_binary_k(k)
    if k > MAX_BINARY_K:
        raise SizeUnsupported(f"k={k} needs more than an n^2-bit matrix fits; limit is {MAX_BINARY_K}")
    V = binary_vertices(k)
    n = V.shape[0]
    rows = np.empty((n, (n + 63) // 64), dtype=np.uint64)
    block = max(1, (1 << 22) // n)
    for start in range(0, n, block):
        stop = min(n, start + block)
        A = (np.bitwise_count(V[start:stop, None] & V[None, :]) & 1).astype(bool)
        A[np.arange(stop - start), np.arange(start, stop)] = False
        rows[start:stop] = pack_rows(A, n)
    return Graph(n, rows)


def binary_independent_count(k: int, r: int) -> int:
    """Exact number of independent r-sets in the binary graph on GF(2)^k.

    Independent sets are orthonormal families. Extending an ordered family of
    size m whose span avoids the all-ones vector has 2^(k-m-1) candidates
    (one fewer at m = 0, where all-ones itself is excluded); for even m >= 2
    exactly one candidate puts all-ones in the span, after which no further
    extension exists. Hence the ordered count is the product of
    ``2^(k-j) - [j odd]`` over j = 1..r, except that an odd final factor with
    r >= 3 is not decremented.
    """
    _check_binary_k(k)
    if r < 0:
        raise InvalidParameter("r must be non-negative")
    if r == 0:
        return 1
    if r > k:
        return 0
    ordered = 1
    for j in range(1, r + 1):
        last_open = j == r and j % 2 == 1 and j >= 3
        ordered *= 2 ** (k - j) - (1 if j % 2 == 1 and not last_open else 0)
    return ordered // math.factorial(r)


def binary_independent_product(k: int, r: int) -> Fraction:
    """The product ``prod_j (2^(k-j) - [j odd]) / r!`` with every odd factor decremented.

    This counts only independent sets whose span avoids the all-ones vector,
    so it falls below :func:`binary_independent_count` for odd r >= 3.
    """
    _check_binary_k(k)
    if r > k:
        return Fraction(0)
    prod = 1
    for j in range(1, r + 1):
        prod *= 2 ** (k - j) - (j % 2)
    return Fraction(prod, math.factorial(r))


def binary_clique_construct(k: int, t_prime: int | None = None) -> list[int]:
    """Clique of size ``t + t'`` with ``t = (k-1)/2``.

    In the complemented representation ``w = v XOR 1`` two vertices are adjacent
    iff ``<w_u, w_v> = 0``. The t vectors ``e_{2i-1} + e_{2i}`` are even-weight
    and mutually orthogonal, so every nonzero vector in their span is adjacent
    to every other. The clique is the t basis vectors followed by the first
    ``t'`` remaining span elements; ``t'`` defaults to its maximum ``2^t - 1 - t``.
    """
    _check_binary_k(k)
    t = (k - 1) // 2
    cap = 2**t - 1 - t
    if t_prime is None:
        t_prime = cap
    if not 0 <= t_prime <= cap:
        raise InvalidParameter(f"t' must lie in [0, {cap}]")
    basis = [0b11 << (2 * i) for i in range(t)]
    picked = list(basis)
    for mask in range(1, 2**t):
        if len(picked) == t + t_prime:
            break
        if mask & (mask - 1) == 0:
            continue
        w = 0
        for i in range(t):
            if (mask >> i) & 1:
                w ^= basis[i]
        picked.append(w)
    ones = (1 << k) - 1
    V = binary_vertices(k)
    ids = np.searchsorted(V, [w ^ ones for w in picked])
    return sorted(int(i) for i in ids)


# planted clique ----------------------------------------------------------------


def plant_clique_with_set(g: Graph, r: int, seed: int) -> tuple[Graph, np.ndarray]:
    if not 0 <= r <= g.n:
        raise InvalidParameter("need 0 <= r <= n")
    rng = _rng(_seed_int(seed))
    chosen = np.sort(rng.choice(g.n, size=r, replace=False))
    A = g.to_dense()
    A[np.ix_(chosen, chosen)] = True
    A[chosen, chosen] = False
    return Graph(g.n, pack_dense(A)), chosen


def plant_clique(g: Graph, r: int, seed: int) -> Graph:
    """Copy of ``g`` with all edges added among ``r`` seeded-uniform vertices."""
    return plant_clique_with_set(g, r, seed)[0]


# geometric ------------------------------------------------------------------------


def sphere_points(n: int, d: int, seed: int) -> np.ndarray:
    rng = _rng(_seed_int(seed))
    X = rng.standard_normal((n, d))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def gen_geometric(n: int, d: int, p: float, seed: int) -> Graph:
    """i ~ j iff ``<X_i, X_j> >= t_{p,d}`` for i.i.d. uniform points on the sphere."""
    from .geometric import threshold_tpd

    if n < 1:
        raise InvalidParameter("n must be positive")
    t = threshold_tpd(p, d).t
    X = sphere_points(n, d, seed)
    A = (X @ X.T) >= t
    np.fill_diagonal(A, False)
    A = np.triu(A, 1)
    return Graph(n, pack_dense(A | A.T))


# ERGM ------------------------------------------------------------------------------


def gen_ergm(n: int, beta: float, gamma: float, sweeps: int, seed: int) -> Graph:
    """Glauber dynamics for the edge-triangle model.

    Starts from G(n, phi(0)); each sweep resamples all pairs once in a fresh
    seeded order, edge (i, j) switching on with probability phi(codeg(i, j) / n).
    """
    from .ergm import ErgmModel, phi_beta

    if n < 1:
        raise InvalidParameter("n must be positive")
    if sweeps < 0:
        raise InvalidParameter("sweeps must be non-negative")
    model = ErgmModel(beta, gamma)
    seed = _seed_int(seed)
    rows = gen_er(n, phi_beta(model, 0.0), derive_seed(seed, 0)).rows.copy()
    iu, ju = np.triu_indices(n, 1)
    rng = _rng(derive_seed(seed, 1))
    for _ in range(sweeps):
        perm = rng.permutation(iu.shape[0])
        K.glauber_sweep(rows, iu[perm], ju[perm], rng.random(iu.shape[0]), float(beta), float(gamma))
    return Graph(n, rows)
