"""Compiled inner loops over packed adjacency rows.

Rows are ``uint64`` arrays of shape ``(n, W)``; bit ``v & 63`` of word ``v >> 6``
in row ``u`` is the adjacency indicator of ``(u, v)``. Integer reductions only,
so results never depend on evaluation order.
"""

import os

import numpy as np
from numba import config, njit, prange

# the bundled TBB is too old for numba; OpenMP avoids a warning on every parallel call
if "NUMBA_THREADING_LAYER" not in os.environ:
    config.THREADING_LAYER = "omp"

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)


@njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def has_bit(rows, u, v):
    return (rows[u, v >> 6] >> np.uint64(v & 63)) & _ONE


@njit(cache=True)
def row_popcounts(rows):
    n, W = rows.shape
    out = np.zeros(n, dtype=np.int64)
    for u in range(n):
        c = 0
        for k in range(W):
            c += popcount64(rows[u, k])
        out[u] = c
    return out


@njit(cache=True, parallel=True)
def codegree_matrix(rows):
    """Symmetric matrix of pairwise common-neighbour counts; diagonal holds degrees."""
    n, W = rows.shape
    out = np.zeros((n, n), dtype=np.int32)
    for u in prange(n):
        for v in range(u, n):
            c = 0
            for k in range(W):
                c += popcount64(rows[u, k] & rows[v, k])
            out[u, v] = c
            out[v, u] = c
    return out


@njit(cache=True)
def tuple_counts(rows, tuples):
    """Common-neighbour count of every row of ``tuples`` (shape ``(m, k)``)."""
    m, k = tuples.shape
    W = rows.shape[1]
    out = np.zeros(m, dtype=np.int64)
    for t in range(m):
        c = 0
        for w in range(W):
            acc = rows[tuples[t, 0], w]
            for j in range(1, k):
                acc &= rows[tuples[t, j], w]
            c += popcount64(acc)
        out[t] = c
    return out


@njit(cache=True, parallel=True)
def max_dev_order2(rows, target):
    """Largest ``|codeg(u, v) - target|`` over pairs u < v, without storing the matrix."""
    n, W = rows.shape
    best = np.full(n, -1.0)
    arg = np.zeros(n, dtype=np.int64)
    for u in prange(n):
        b = -1.0
        a = 0
        for v in range(u + 1, n):
            c = 0
            for k in range(W):
                c += popcount64(rows[u, k] & rows[v, k])
            dev = abs(c - target)
            if dev > b:
                b = dev
                a = v
        best[u] = b
        arg[u] = a
    u = 0
    for i in range(n):
        if best[i] > best[u]:
            u = i
    return best[u], u, arg[u]


@njit(cache=True)
def max_dev_order3(rows, target):
    n, W = rows.shape
    best = -1.0
    arg = np.zeros(3, dtype=np.int64)
    tmp = np.empty(W, dtype=np.uint64)
    for a in range(n):
        for b in range(a + 1, n):
            for k in range(W):
                tmp[k] = rows[a, k] & rows[b, k]
            for c in range(b + 1, n):
                cnt = 0
                for k in range(W):
                    cnt += popcount64(tmp[k] & rows[c, k])
                dev = abs(cnt - target)
                if dev > best:
                    best = dev
                    arg[0] = a
                    arg[1] = b
                    arg[2] = c
    return best, arg


@njit(cache=True)
def max_dev_order4(rows, target):
    n, W = rows.shape
    best = -1.0
    arg = np.zeros(4, dtype=np.int64)
    t2 = np.empty(W, dtype=np.uint64)
    t3 = np.empty(W, dtype=np.uint64)
    for a in range(n):
        for b in range(a + 1, n):
            for k in range(W):
                t2[k] = rows[a, k] & rows[b, k]
            for c in range(b + 1, n):
                for k in range(W):
                    t3[k] = t2[k] & rows[c, k]
                for d in range(c + 1, n):
                    cnt = 0
                    for k in range(W):
                        cnt += popcount64(t3[k] & rows[d, k])
                    dev = abs(cnt - target)
                    if dev > best:
                        best = dev
                        arg[0] = a
                        arg[1] = b
                        arg[2] = c
                        arg[3] = d
    return best, arg


@njit(cache=True, parallel=True)
def k4_count(up):
    """Number of 4-cliques. ``up`` holds each row masked to higher-indexed neighbours."""
    n, W = up.shape
    partial = np.zeros(n, dtype=np.int64)
    for u in prange(n):
        tmp = np.empty(W, dtype=np.uint64)
        total = 0
        for v in range(u + 1, n):
            if not has_bit(up, u, v):
                continue
            w0 = (v + 1) >> 6
            for k in range(w0, W):
                tmp[k] = up[u, k] & up[v, k]
            for k in range(w0, W):
                word = tmp[k]
                while word:
                    low = word & (~word + _ONE)
                    w = k * 64 + popcount64(low - _ONE)
                    word ^= low
                    for j in range(w >> 6, W):
                        total += popcount64(tmp[j] & up[w, j])
        partial[u] = total
    return partial.sum()


@njit(cache=True)
def _subset_code_step(rows, verts, prefix, k):
    bits = np.int64(0)
    v = verts[k]
    for i in range(k):
        bits = (bits << 1) | np.int64(has_bit(rows, verts[i], v))
    prefix[k + 1] = (prefix[k] << k) | bits


@njit(cache=True)
def subset_code_histogram(rows, s):
    """Histogram of labelled codes over all s-subsets (lexicographic enumeration)."""
    n = rows.shape[0]
    M = s * (s - 1) // 2
    hist = np.zeros(1 << M, dtype=np.int64)
    if s > n:
        return hist
    verts = np.arange(s)
    prefix = np.zeros(s + 1, dtype=np.int64)
    for k in range(s):
        _subset_code_step(rows, verts, prefix, k)
    while True:
        hist[prefix[s]] += 1
        i = s - 1
        while i >= 0 and verts[i] == n - s + i:
            i -= 1
        if i < 0:
            break
        verts[i] += 1
        for j in range(i + 1, s):
            verts[j] = verts[j - 1] + 1
        for k in range(i, s):
            _subset_code_step(rows, verts, prefix, k)
    return hist


@njit(cache=True)
def subset_codes(rows, s, total):
    """Labelled code of every s-subset, for sizes whose histogram would not fit."""
    n = rows.shape[0]
    out = np.empty(total, dtype=np.int64)
    if s > n:
        return out[:0]
    verts = np.arange(s)
    prefix = np.zeros(s + 1, dtype=np.int64)
    for k in range(s):
        _subset_code_step(rows, verts, prefix, k)
    t = 0
    while True:
        out[t] = prefix[s]
        t += 1
        i = s - 1
        while i >= 0 and verts[i] == n - s + i:
            i -= 1
        if i < 0:
            break
        verts[i] += 1
        for j in range(i + 1, s):
            verts[j] = verts[j - 1] + 1
        for k in range(i, s):
            _subset_code_step(rows, verts, prefix, k)
    return out[:t]


@njit(cache=True)
def tuple_codes(rows, tuples):
    m, s = tuples.shape
    out = np.empty(m, dtype=np.int64)
    prefix = np.zeros(s + 1, dtype=np.int64)
    for t in range(m):
        verts = tuples[t]
        for k in range(s):
            _subset_code_step(rows, verts, prefix, k)
        out[t] = prefix[s]
    return out


@njit(cache=True)
def canon_and_aut(code, s):
    """Minimum code over all relabellings, and the number of relabellings attaining it.

    Codes are MSB-first over pairs in colex order, so the top C(k+1, 2) bits are
    fixed once positions 0..k are assigned; branches whose prefix exceeds the
    incumbent are cut.
    """
    M = s * (s - 1) // 2
    adj = np.zeros((s, s), dtype=np.int64)
    c = 0
    for j in range(1, s):
        for i in range(j):
            b = (code >> (M - 1 - c)) & 1
            adj[i, j] = b
            adj[j, i] = b
            c += 1
    perm = np.zeros(s, dtype=np.int64)
    used = np.zeros(s, dtype=np.bool_)
    nxt = np.zeros(s + 1, dtype=np.int64)
    prefix = np.zeros(s + 1, dtype=np.int64)
    best = np.int64(-1)
    count = 0
    k = 0
    while k >= 0:
        if k == s:
            val = prefix[s]
            if best < 0 or val < best:
                best = val
                count = 1
            elif val == best:
                count += 1
            k -= 1
            used[perm[k]] = False
            continue
        v = nxt[k]
        while v < s and used[v]:
            v += 1
        if v >= s:
            k -= 1
            if k >= 0:
                used[perm[k]] = False
            continue
        nxt[k] = v + 1
        bits = np.int64(0)
        for i in range(k):
            bits = (bits << 1) | adj[perm[i], v]
        p = (prefix[k] << k) | bits
        if best >= 0:
            top = (k + 1) * k // 2
            if p > (best >> (M - top)):
                continue
        perm[k] = v
        used[v] = True
        prefix[k + 1] = p
        k += 1
        nxt[k] = 0
    return best, count


@njit(cache=True)
def canon_many(codes, s):
    m = codes.shape[0]
    canon = np.empty(m, dtype=np.int64)
    aut = np.empty(m, dtype=np.int64)
    for t in range(m):
        c, a = canon_and_aut(codes[t], s)
        canon[t] = c
        aut[t] = a
    return canon, aut


@njit(cache=True)
def glauber_sweep(rows, order_i, order_j, uniforms, beta, gamma):
    """One pass of single-edge heat-bath updates; mutates ``rows`` in place."""
    n, W = rows.shape
    for t in range(order_i.shape[0]):
        i = order_i[t]
        j = order_j[t]
        c = 0
        for k in range(W):
            c += popcount64(rows[i, k] & rows[j, k])
        x = beta + gamma * c / n
        if x >= 0:
            prob = 1.0 / (1.0 + np.exp(-x))
        else:
            e = np.exp(x)
            prob = e / (1.0 + e)
        wi = j >> 6
        wj = i >> 6
        bi = _ONE << np.uint64(j & 63)
        bj = _ONE << np.uint64(i & 63)
        if uniforms[t] < prob:
            rows[i, wi] |= bi
            rows[j, wj] |= bj
        else:
            rows[i, wi] &= ~bi
            rows[j, wj] &= ~bj


@njit(cache=True)
def switch_steps(adj, edges, pick1, pick2, flip):
    """Double-edge switches; rejected proposals leave the state unchanged."""
    accepted = 0
    for t in range(pick1.shape[0]):
        e1 = pick1[t]
        e2 = pick2[t]
        if e1 == e2:
            continue
        a = edges[e1, 0]
        b = edges[e1, 1]
        if flip[t]:
            c = edges[e2, 1]
            d = edges[e2, 0]
        else:
            c = edges[e2, 0]
            d = edges[e2, 1]
        # (a,b),(c,d) -> (a,d),(c,b)
        if a == d or c == b:
            continue
        if adj[a, d] or adj[c, b]:
            continue
        adj[a, b] = 0
        adj[b, a] = 0
        adj[c, d] = 0
        adj[d, c] = 0
        adj[a, d] = 1
        adj[d, a] = 1
        adj[c, b] = 1
        adj[b, c] = 1
        edges[e1, 0] = a
        edges[e1, 1] = d
        edges[e2, 0] = c
        edges[e2, 1] = b
        accepted += 1
    return accepted
