"""Induced motif census: isomorphism classes, exact and sampled counts, ER baselines.

A motif on ``s`` vertices is identified by its canonical code: the adjacency
upper triangle read MSB-first over pairs in colex order ``(0,1), (0,2), (1,2),
(0,3), ...``, minimised over all ``s!`` relabellings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Literal

import numpy as np

from . import _kernels as K
from .errors import BudgetExceeded, InvalidParameter, SizeUnsupported
from .graph import Graph, VertexTuple, _full_mask, tuple_common_neighborhood

MAX_S = 8
DEFAULT_BUDGET = 20_000_000
SAMPLE_CHUNK = 1 << 16


@dataclass(frozen=True, order=True)
class MotifClass:
    s: int
    canon: int
    edge_count: int = field(compare=False)
    aut_size: int = field(compare=False)

    @property
    def canon_hex(self) -> str:
        return format(self.canon, "x")

    def adjacency(self) -> np.ndarray:
        return decode(self.canon, self.s)

    @property
    def name(self) -> str:
        return motif_name(self)


def n_pairs(s: int) -> int:
    return s * (s - 1) // 2


def encode(adj) -> int:
    """Labelled code of an ``s x s`` adjacency matrix."""
    a = np.asarray(adj)
    s = a.shape[0]
    code = 0
    for j in range(1, s):
        for i in range(j):
            code = (code << 1) | int(bool(a[i, j]))
    return code


def decode(code: int, s: int) -> np.ndarray:
    M = n_pairs(s)
    a = np.zeros((s, s), dtype=bool)
    c = 0
    for j in range(1, s):
        for i in range(j):
            a[i, j] = a[j, i] = bool((code >> (M - 1 - c)) & 1)
            c += 1
    return a


def _check_size(s: int, lo: int = 1) -> None:
    if s > MAX_S:
        raise SizeUnsupported(f"motif size {s} exceeds {MAX_S}")
    if s < lo:
        raise InvalidParameter(f"motif size must be at least {lo}")


def canonical_code(adj) -> tuple[int, int]:
    """Canonical code and automorphism-group size of a small graph."""
    a = np.asarray(adj)
    s = a.shape[0]
    _check_size(s)
    if a.shape != (s, s) or not np.array_equal(a, a.T) or np.diagonal(a).any():
        raise InvalidParameter("adjacency must be symmetric 0/1 with zero diagonal")
    canon, aut = K.canon_and_aut(np.int64(encode(a)), s)
    return int(canon), int(aut)


def canonicalize_codes(codes: np.ndarray, s: int) -> tuple[np.ndarray, np.ndarray]:
    return K.canon_many(np.ascontiguousarray(codes, dtype=np.int64), s)


@lru_cache(maxsize=None)
def _classes(s: int) -> tuple[MotifClass, ...]:
    if s == 1:
        return (MotifClass(1, 0, 0, 1),)
    prev = _classes(s - 1)
    ext = np.arange(1 << (s - 1), dtype=np.int64)
    codes = np.concatenate([(np.int64(c.canon) << (s - 1)) | ext for c in prev])
    canon, aut = canonicalize_codes(codes, s)
    uniq, idx = np.unique(canon, return_index=True)
    out = [MotifClass(s, int(c), int(c).bit_count(), int(aut[i])) for c, i in zip(uniq, idx)]
    out.sort(key=lambda m: (m.edge_count, m.canon))
    return tuple(out)


def enumerate_motif_classes(s: int) -> list[MotifClass]:
    """Every isomorphism class on ``s`` vertices, ordered by (edges, code)."""
    _check_size(s, lo=2)
    return list(_classes(s))


def motif_class(adj) -> MotifClass:
    a = np.asarray(adj)
    canon, aut = canonical_code(a)
    return MotifClass(a.shape[0], canon, canon.bit_count(), aut)


def motif_name(m: MotifClass) -> str:
    s, e = m.s, m.edge_count
    if e == 0:
        return f"E{s}"
    if e == n_pairs(s):
        return f"K{s}"
    degs = tuple(sorted(decode(m.canon, s).sum(axis=0).tolist(), reverse=True))
    return f"s{s}e{e}d" + "".join(str(d) for d in degs)


# exact counting ---------------------------------------------------------


def _histogram_to_classes(raw_codes: np.ndarray, raw_counts: np.ndarray, s: int) -> dict[int, int]:
    out = {m.canon: 0 for m in _classes(s)}
    if raw_codes.size:
        canon, _ = canonicalize_codes(raw_codes, s)
        for c, k in zip(canon.tolist(), raw_counts.tolist()):
            out[c] += k
    return out


def _count_by_enumeration(g: Graph, s: int) -> dict[int, int]:
    if n_pairs(s) <= 21:
        hist = K.subset_code_histogram(g.rows, s)
        nz = np.flatnonzero(hist)
        return _histogram_to_classes(nz.astype(np.int64), hist[nz], s)
    codes = K.subset_codes(g.rows, s, math.comb(g.n, s))
    uniq, counts = np.unique(codes, return_counts=True)
    return _histogram_to_classes(uniq, counts, s)


@lru_cache(maxsize=None)
def _containment(s: int) -> dict[int, dict[int, int]]:
    """``table[H][F]`` = number of spanning edge-subgraphs of class H isomorphic to F."""
    table = {}
    for h in _classes(s):
        a = decode(h.canon, s)
        edges = [(i, j) for i, j in combinations(range(s), 2) if a[i, j]]
        row: dict[int, int] = {}
        for mask in range(1 << len(edges)):
            sub = np.zeros((s, s), dtype=bool)
            for b, (i, j) in enumerate(edges):
                if (mask >> b) & 1:
                    sub[i, j] = sub[j, i] = True
            c, _ = canonical_code(sub)
            row[c] = row.get(c, 0) + 1
        table[h.canon] = row
    return table


def _key(s: int, edges) -> int:
    a = np.zeros((s, s), dtype=bool)
    for i, j in edges:
        a[i, j] = a[j, i] = True
    return canonical_code(a)[0]


def _subgraph_counts(g: Graph, s: int) -> dict[int, int]:
    """Non-induced (subgraph-copy) counts of every spanning pattern on ``s`` vertices."""
    n = g.n
    d = g.degrees.astype(np.int64)
    m = g.edge_count
    p3 = int((d * (d - 1) // 2).sum())
    if s == 2:
        return {_key(2, []): math.comb(n, 2), _key(2, [(0, 1)]): m}
    A = g.to_dense()
    C = g.codegrees.astype(np.int64)
    np.fill_diagonal(C, 0)
    AC = np.where(A, C, 0)
    tri = int(AC.sum()) // 6
    if s == 3:
        return {
            _key(3, []): math.comb(n, 3),
            _key(3, [(0, 1)]): m * (n - 2),
            _key(3, [(0, 1), (1, 2)]): p3,
            _key(3, [(0, 1), (1, 2), (0, 2)]): tri,
        }
    tri_v = AC.sum(axis=1) // 2
    c2 = C * (C - 1) // 2
    dm1 = d - 1
    p4 = int((np.where(A, np.outer(dm1, dm1), 0)).sum()) // 2 - 3 * tri
    up = np.triu(A, 1)
    from .graph import pack_dense

    k4 = int(K.k4_count(pack_dense(up)))
    return {
        _key(4, []): math.comb(n, 4),
        _key(4, [(0, 1)]): m * math.comb(n - 2, 2),
        _key(4, [(0, 1), (2, 3)]): math.comb(m, 2) - p3,
        _key(4, [(0, 1), (1, 2)]): p3 * (n - 3),
        _key(4, [(0, 1), (1, 2), (0, 2)]): tri * (n - 3),
        _key(4, [(0, 1), (0, 2), (0, 3)]): int((d * (d - 1) * (d - 2) // 6).sum()),
        _key(4, [(0, 1), (1, 2), (2, 3)]): p4,
        _key(4, [(0, 1), (1, 2), (2, 3), (0, 3)]): int(c2.sum()) // 4,
        _key(4, [(0, 1), (1, 2), (0, 2), (0, 3)]): int((tri_v * (d - 2)).sum()),
        _key(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]): int(np.where(A, c2, 0).sum()) // 2,
        _key(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]): k4,
    }


def _count_algebraic(g: Graph, s: int) -> dict[int, int]:
    """Induced counts for s <= 4 by inverting subgraph counts over the containment order."""
    sub = _subgraph_counts(g, s)
    table = _containment(s)
    induced: dict[int, int] = {}
    for h in sorted(_classes(s), key=lambda m: -m.edge_count):
        total = sub[h.canon]
        for bigger, val in induced.items():
            total -= table[bigger].get(h.canon, 0) * val
        induced[h.canon] = total
    return {m.canon: induced[m.canon] for m in _classes(s)}


def count_induced_exact(
    g: Graph,
    s: int,
    budget: int = DEFAULT_BUDGET,
    method: Literal["auto", "enumerate", "algebraic"] = "auto",
) -> dict[int, int]:
    """Exact induced counts ``canon -> n_G(H)`` over all classes on ``s`` vertices.

    Sizes up to 4 switch to closed-form subgraph counts when the subset count
    exceeds ``budget``; larger sizes raise :class:`BudgetExceeded` instead.
    """
    _check_size(s, lo=2)
    if s > g.n:
        return {m.canon: 0 for m in _classes(s)}
    total = math.comb(g.n, s)
    if method == "algebraic" or (method == "auto" and total > budget and s <= 4):
        if s > 4:
            raise SizeUnsupported("closed-form counting covers s <= 4")
        return _count_algebraic(g, s)
    if total > budget:
        raise BudgetExceeded(f"C({g.n},{s}) = {total} subsets exceeds budget {budget}")
    return _count_by_enumeration(g, s)


# sampling ------------------------------------------------------------------


def sample_subsets(n: int, s: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` uniform s-subsets of ``range(n)`` (rows of distinct vertices)."""
    if s > n:
        raise InvalidParameter("subset size exceeds vertex count")
    out = rng.integers(0, n, size=(count, s))
    while True:
        srt = np.sort(out, axis=1)
        bad = (np.diff(srt, axis=1) == 0).any(axis=1)
        k = int(bad.sum())
        if not k:
            return out
        out[bad] = rng.integers(0, n, size=(k, s))


def _sampled_class_tallies(g: Graph, s: int, samples: int, seed: int) -> dict[int, int]:
    tallies = {m.canon: 0 for m in _classes(s)}
    done = 0
    chunk = 0
    while done < samples:
        size = min(SAMPLE_CHUNK, samples - done)
        rng = np.random.default_rng([seed, chunk])
        tuples = sample_subsets(g.n, s, size, rng)
        codes = K.tuple_codes(g.rows, tuples)
        uniq, counts = np.unique(codes, return_counts=True)
        canon, _ = canonicalize_codes(uniq, s)
        for c, k in zip(canon.tolist(), counts.tolist()):
            tallies[c] += k
        done += size
        chunk += 1
    return tallies


def count_induced_sampled(g: Graph, s: int, samples: int, seed: int) -> dict[int, tuple[float, float]]:
    """Monte Carlo ``canon -> (estimate, stderr)`` from uniform s-subsets.

    Chunk ``c`` draws from the stream seeded by ``(seed, c)``, so results do not
    depend on how chunks are scheduled.
    """
    _check_size(s, lo=2)
    if samples < 1:
        raise InvalidParameter("samples must be >= 1")
    tallies = _sampled_class_tallies(g, s, samples, seed)
    scale = float(math.comb(g.n, s))
    out = {}
    for c, k in tallies.items():
        f = k / samples
        out[c] = (f * scale, math.sqrt(f * (1 - f) / samples) * scale)
    return out


# Erdős–Rényi baseline ---------------------------------------------------


def log_er_expectation(n: int, p: float, motif: MotifClass) -> float:
    if not 0 < p < 1:
        raise InvalidParameter("p must lie in (0, 1)")
    s = motif.s
    if s > n:
        return -math.inf
    # direct sum: an lgamma difference loses ~1e-9 at n ~ 1e6
    log_falling = math.fsum(math.log(n - i) for i in range(s))
    e = motif.edge_count
    return (
        log_falling
        - math.log(motif.aut_size)
        + e * math.log(p)
        + (n_pairs(s) - e) * math.log1p(-p)
    )


def er_expectation(n: int, p: float, motif: MotifClass) -> float:
    """Expected induced copies of ``motif`` in G(n, p)."""
    return math.exp(log_er_expectation(n, p, motif))


# reports -----------------------------------------------------------------


@dataclass
class ClassRow:
    motif: MotifClass
    count: float
    er_expectation: float
    ratio_error: float
    stderr: float | None = None

    def to_dict(self) -> dict:
        d = {
            "canon_hex": self.motif.canon_hex,
            "edges": self.motif.edge_count,
            "aut": self.motif.aut_size,
            "count": self.count,
            "er_expectation": self.er_expectation,
            "ratio_error": self.ratio_error,
        }
        if self.stderr is not None:
            d["stderr"] = self.stderr
        return d


@dataclass
class CensusReport:
    n: int
    p: float
    s: int
    mode: str
    classes: list[ClassRow]
    samples: int | None = None

    @property
    def max_ratio_error(self) -> float:
        return max(r.ratio_error for r in self.classes)

    def by_canon(self) -> dict[int, ClassRow]:
        return {r.motif.canon: r for r in self.classes}

    def to_dict(self) -> dict:
        mode = self.mode if self.samples is None else f"sampled({self.samples})"
        return {
            "n": self.n,
            "p": self.p,
            "s": self.s,
            "mode": mode,
            "classes": [r.to_dict() for r in self.classes],
            "max_ratio_error": self.max_ratio_error,
        }


def census_report(
    g: Graph,
    p: float,
    s: int,
    mode: str = "exact",
    seed: int = 0,
    samples: int = 100_000,
    budget: int = DEFAULT_BUDGET,
) -> CensusReport:
    """Per-class observed counts against the G(n, p) baseline."""
    if not 0 < p < 1:
        raise InvalidParameter("p must lie in (0, 1)")
    rows = []
    if mode == "exact":
        counts = count_induced_exact(g, s, budget=budget)
        for m in _classes(s):
            er = er_expectation(g.n, p, m)
            rows.append(ClassRow(m, counts[m.canon], er, abs(counts[m.canon] / er - 1)))
        return CensusReport(g.n, p, s, "exact", rows)
    if mode == "sampled":
        est = count_induced_sampled(g, s, samples, seed)
        for m in _classes(s):
            val, se = est[m.canon]
            er = er_expectation(g.n, p, m)
            rows.append(ClassRow(m, val, er, abs(val / er - 1), se))
        return CensusReport(g.n, p, s, "sampled", rows, samples=samples)
    raise InvalidParameter(f"unknown census mode {mode!r}")


# identity between consecutive motif sizes --------------------------------


def signed_rows(g: Graph) -> np.ndarray:
    """Rows ``0..n-1`` are non-neighbourhoods (self excluded), ``n..2n-1`` neighbourhoods."""
    full = _full_mask(g.n)
    eye = np.zeros_like(g.rows)
    idx = np.arange(g.n)
    eye[idx, idx >> 6] = np.left_shift(np.uint64(1), (idx & 63).astype(np.uint64))
    zero = ~g.rows & full[None, :] & ~eye
    return np.ascontiguousarray(np.concatenate([zero, g.rows]))


def labelled_embeddings(g: Graph, pattern: np.ndarray, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All ordered vertex tuples ``t`` with ``A[t_i, t_j] == pattern[i, j]`` for i != j."""
    r = pattern.shape[0]
    if math.perm(g.n, r) > budget:
        raise BudgetExceeded(f"(n)_r = {math.perm(g.n, r)} exceeds budget {budget}")
    A = g.to_dense()
    partial = np.arange(g.n, dtype=np.int64)[:, None]
    for k in range(1, r):
        cand = np.ones((partial.shape[0], g.n), dtype=bool)
        for i in range(k):
            col = partial[:, i]
            cand &= A[col] == bool(pattern[i, k])
            cand[np.arange(partial.shape[0]), col] = False
        rows, verts = np.nonzero(cand)
        partial = np.concatenate([partial[rows], verts[:, None]], axis=1)
    return partial


def recursion_identity_sides(g: Graph, motif: MotifClass, marked: int, budget: int = DEFAULT_BUDGET) -> tuple[int, int]:
    """Both sides of ``|Aut(H_{r+1})| n_G(H_{r+1}) = sum over labelled copies of H_r of f_r``.

    ``H_r`` is ``motif`` with vertex ``marked`` deleted and the sign vector is
    the marked vertex's adjacency into ``H_r``. The right side sums over every
    labelled embedding of ``H_r``, which is ``|Aut(H_r)|`` times the sum over
    unlabelled copies.
    """
    s = motif.s
    if not 0 <= marked < s:
        raise InvalidParameter("marked vertex out of range")
    if s > 6:
        raise SizeUnsupported("identity check limited to r + 1 <= 6")
    a = motif.adjacency()
    keep = [i for i in range(s) if i != marked]
    pattern = a[np.ix_(keep, keep)]
    signs = a[marked, keep].astype(np.int64)
    lhs = motif.aut_size * count_induced_exact(g, s, budget=budget)[motif.canon]
    emb = labelled_embeddings(g, pattern, budget=budget)
    if emb.shape[0] == 0:
        return lhs, 0
    idx = emb + g.n * signs[None, :]
    rhs = int(K.tuple_counts(signed_rows(g), np.ascontiguousarray(idx)).sum())
    return lhs, rhs


def recursion_identity_check(g: Graph, motif: MotifClass, marked: int | None = None, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff the identity holds exactly (``marked`` defaults to the last vertex)."""
    if marked is None:
        marked = motif.s - 1
    lhs, rhs = recursion_identity_sides(g, motif, marked, budget)
    return lhs == rhs


def f_r(g: Graph, vertices, signs) -> int:
    """Convenience wrapper around :func:`tuple_common_neighborhood`."""
    return tuple_common_neighborhood(g, VertexTuple(tuple(vertices), tuple(signs)))
