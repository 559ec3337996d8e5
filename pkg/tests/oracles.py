"""Independent reference implementations used only by the tests.

Nothing here calls the package's kernels: isomorphism is decided by trying
every permutation on plain Python edge sets, and counts come from itertools.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

import numpy as np


def random_dense(rng: np.random.Generator, n: int, p: float = 0.5) -> np.ndarray:
    A = np.triu(rng.random((n, n)) < p, 1)
    return A | A.T


def edge_set(A: np.ndarray, verts) -> frozenset:
    return frozenset((i, j) for i, j in combinations(range(len(verts)), 2) if A[verts[i], verts[j]])


def isomorphic(e1: frozenset, e2: frozenset, s: int) -> bool:
    if len(e1) != len(e2):
        return False
    for perm in permutations(range(s)):
        if all(tuple(sorted((perm[i], perm[j]))) in e2 for i, j in e1):
            return True
    return False


def naive_census(A: np.ndarray, s: int) -> list[tuple[frozenset, int]]:
    """(representative edge set, count) for every class that occurs."""
    classes: list[list] = []
    for sub in combinations(range(A.shape[0]), s):
        e = edge_set(A, sub)
        for c in classes:
            if isomorphic(e, c[0], s):
                c[1] += 1
                break
        else:
            classes.append([e, 1])
    return [(e, k) for e, k in classes]


def all_classes(s: int) -> list[frozenset]:
    pairs = list(combinations(range(s), 2))
    reps: list[frozenset] = []
    for mask in range(1 << len(pairs)):
        e = frozenset(p for b, p in enumerate(pairs) if (mask >> b) & 1)
        if not any(isomorphic(e, r, s) for r in reps):
            reps.append(e)
    return reps


def automorphisms(e: frozenset, s: int) -> int:
    return sum(
        all(tuple(sorted((perm[i], perm[j]))) in e for i, j in e) for perm in permutations(range(s))
    )


def sign_matrices(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(non-neighbour matrix without the diagonal, neighbour matrix)."""
    n = A.shape[0]
    return (~A) & ~np.eye(n, dtype=bool), A.copy()


def with_repetition_sum(A: np.ndarray, xi) -> int:
    """sum over all of [n]^r (repeats allowed) of |intersection of N_{v_i}^{xi_i}|."""
    M = sign_matrices(A)
    n = A.shape[0]
    total = 0
    for tup in product(range(n), repeat=len(xi)):
        acc = np.ones(n, dtype=bool)
        for v, x in zip(tup, xi):
            acc &= M[x][v]
        total += int(acc.sum())
    return total


def count_independent_sets(A: np.ndarray) -> dict[int, int]:
    """Number of independent sets of every size, by backtracking over candidate sets."""
    n = A.shape[0]
    non = [frozenset(np.flatnonzero(~A[v]).tolist()) - {v} for v in range(n)]
    counts: dict[int, int] = {}

    def grow(size, cand):
        counts[size] = counts.get(size, 0) + 1
        for v in sorted(cand):
            grow(size + 1, frozenset(u for u in cand if u > v) & non[v])

    grow(0, frozenset(range(n)))
    return counts
