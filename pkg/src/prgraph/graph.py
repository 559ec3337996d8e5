"""Immutable simple graphs on packed bitset rows, plus neighbourhood queries.

Generalized neighbourhoods follow one convention throughout the package: the
non-neighbourhood of ``v`` (sign 0) never contains ``v`` itself, so
``|N_v^0| + |N_v^1| = n - 1`` for every vertex.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .errors import (
    GraphFormatError,
    InvalidArity,
    InvalidEdge,
    InvalidParameter,
    InvalidTuple,
    InvalidVertex,
)

MAGIC = b"PRGB"
FORMAT_VERSION = 1


def words_for(n: int) -> int:
    return (n + 63) // 64


def pack_rows(block: np.ndarray, n: int) -> np.ndarray:
    """Pack a ``(rows, n)`` 0/1 block into little-endian uint64 words."""
    W = words_for(n)
    packed = np.packbits(np.asarray(block, dtype=bool), axis=1, bitorder="little")
    out = np.zeros((block.shape[0], W * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8").astype(np.uint64, copy=False).reshape(block.shape[0], W)


def pack_dense(dense: np.ndarray) -> np.ndarray:
    """Pack an ``(n, n)`` 0/1 matrix into bitset rows."""
    return pack_rows(dense, dense.shape[0])


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph with ``n`` bitset adjacency rows."""

    n: int
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.rows.shape != (self.n, words_for(self.n)) or self.rows.dtype != np.uint64:
            raise InvalidParameter("rows must be uint64 of shape (n, ceil(n/64))")
        self.rows.setflags(write=False)

    # construction -------------------------------------------------------

    @classmethod
    def from_dense(cls, dense) -> "Graph":
        a = np.asarray(dense).astype(bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidParameter("adjacency must be square")
        if a.diagonal().any():
            raise InvalidEdge("self-loop in adjacency matrix")
        if not np.array_equal(a, a.T):
            raise InvalidParameter("adjacency must be symmetric")
        return cls(a.shape[0], pack_dense(a))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.zeros((n, words_for(n)), dtype=np.uint64))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        a = np.ones((n, n), dtype=bool)
        np.fill_diagonal(a, False)
        return cls.from_dense(a)

    # basic queries ------------------------------------------------------

    @cached_property
    def degrees(self) -> np.ndarray:
        return K.row_popcounts(self.rows)

    @cached_property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        return bool((int(self.rows[u, v >> 6]) >> (v & 63)) & 1)

    def to_dense(self) -> np.ndarray:
        bytes_ = self.rows.astype("<u8").view(np.uint8).reshape(self.n, -1)
        return np.unpackbits(bytes_, axis=1, bitorder="little", count=self.n).astype(bool)

    def neighbors(self, v: int) -> np.ndarray:
        self._check_vertex(v)
        bytes_ = self.rows[v].astype("<u8").view(np.uint8)
        bits = np.unpackbits(bytes_, bitorder="little", count=self.n)
        return np.flatnonzero(bits)

    def edges(self) -> np.ndarray:
        """Edge list as an ``(m, 2)`` array with ``u < v``, sorted."""
        a = self.to_dense()
        u, v = np.nonzero(np.triu(a, 1))
        return np.stack([u, v], axis=1)

    def complement(self) -> "Graph":
        a = ~self.to_dense()
        np.fill_diagonal(a, False)
        return Graph.from_dense(a)

    def induced(self, vertices: Sequence[int]) -> "Graph":
        vs = np.asarray(vertices, dtype=np.int64)
        return Graph.from_dense(self.to_dense()[np.ix_(vs, vs)])

    @cached_property
    def codegrees(self) -> np.ndarray:
        """All pairwise common-neighbour counts (diagonal = degree)."""
        return K.codegree_matrix(self.rows)

    def check_invariants(self) -> None:
        """Assert symmetry, loop-freeness and zero padding bits."""
        W = words_for(self.n)
        pad = W * 64 - self.n
        if pad:
            mask = np.uint64(((1 << pad) - 1) << (64 - pad))
            assert not (self.rows[:, W - 1] & mask).any(), "padding bits set"
        a = self.to_dense()
        assert not a.diagonal().any(), "self-loop"
        assert np.array_equal(a, a.T), "asymmetric adjacency"
        assert self.edge_count * 2 == int(a.sum())

    def _check_vertex(self, v) -> None:
        if not (0 <= int(v) < self.n):
            raise InvalidVertex(f"vertex {v} out of range for n={self.n}")

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash((self.n, self.rows.tobytes()))


@dataclass(frozen=True)
class VertexTuple:
    """Ordered distinct vertices paired with signs (1 = neighbour, 0 = non-neighbour)."""

    vertices: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        object.__setattr__(self, "signs", tuple(int(x) for x in self.signs))
        if len(self.vertices) != len(self.signs):
            raise InvalidTuple("vertices and signs differ in length")
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidTuple("repeated vertex in tuple")
        if any(x not in (0, 1) for x in self.signs):
            raise InvalidTuple("signs must be 0 or 1")

    def __len__(self):
        return len(self.vertices)

    @property
    def zeros(self) -> int:
        return self.signs.count(0)


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Graph on ``n`` vertices with the given edges; duplicates collapse."""
    if n < 1:
        raise InvalidParameter("n must be positive")
    e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if e.size:
        if (e < 0).any() or (e >= n).any():
            bad = e[((e < 0) | (e >= n)).any(axis=1)][0]
            raise InvalidVertex(f"endpoint out of range in edge {tuple(bad)} (n={n})")
        loops = e[:, 0] == e[:, 1]
        if loops.any():
            raise InvalidEdge(f"self-loop on vertex {e[loops][0, 0]}")
    rows = np.zeros((n, words_for(n)), dtype=np.uint64)
    if e.size:
        both = np.concatenate([e, e[:, ::-1]])
        u, v = both[:, 0], both[:, 1]
        bits = np.left_shift(np.uint64(1), (v & 63).astype(np.uint64))
        np.bitwise_or.at(rows, (u, v >> 6), bits)
    return Graph(n, rows)


# neighbourhoods -----------------------------------------------------------


def _sign_row(g: Graph, v: int, xi: int) -> np.ndarray:
    if xi not in (0, 1):
        raise InvalidParameter("sign must be 0 or 1")
    g._check_vertex(v)
    row = g.rows[v]
    if xi == 1:
        return row
    full = _full_mask(g.n).copy()
    full[v >> 6] &= ~np.uint64(1 << (v & 63))
    return ~row & full


_FULL_CACHE: dict[int, np.ndarray] = {}


def _full_mask(n: int) -> np.ndarray:
    m = _FULL_CACHE.get(n)
    if m is None:
        W = words_for(n)
        m = np.full(W, np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
        pad = W * 64 - n
        if pad:
            m[-1] = np.uint64((1 << (64 - pad)) - 1)
        m.setflags(write=False)
        _FULL_CACHE[n] = m
    return m


def _bits_to_set(words: np.ndarray, n: int) -> set[int]:
    bits = np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little", count=n)
    return set(np.flatnonzero(bits).tolist())


def _set_to_bits(vertices: Iterable[int], n: int) -> np.ndarray:
    out = np.zeros(words_for(n), dtype=np.uint64)
    for v in vertices:
        if not (0 <= v < n):
            raise InvalidVertex(f"vertex {v} out of range for n={n}")
        out[v >> 6] |= np.uint64(1 << (v & 63))
    return out


def generalized_neighborhood(g: Graph, v: int, xi: int) -> set[int]:
    """Neighbours of ``v`` (``xi=1``) or its non-neighbours other than ``v`` (``xi=0``)."""
    return _bits_to_set(_sign_row(g, v, xi), g.n)


def neighborhood_in_set(g: Graph, v: int, B: Iterable[int], xi: int) -> int:
    row = _sign_row(g, v, xi)
    mask = _set_to_bits(B, g.n)
    return int(np.bitwise_count(row & mask).sum())


def common_mask(g: Graph, t: VertexTuple) -> np.ndarray:
    """Bitset of the intersection of the tuple's generalized neighbourhoods."""
    if len(t) == 0:
        raise InvalidTuple("empty tuple")
    acc = _full_mask(g.n).copy()
    for v, xi in zip(t.vertices, t.signs):
        acc &= _sign_row(g, v, xi)
    return acc


def tuple_common_neighborhood(g: Graph, t: VertexTuple) -> int:
    """``f_r``: size of the intersection of the r generalized neighbourhoods."""
    return int(np.bitwise_count(common_mask(g, t)).sum())


def codegree_order_k(g: Graph, vertices: Sequence[int]) -> int:
    """Common neighbours of 2, 3 or 4 distinct vertices."""
    k = len(vertices)
    if not 2 <= k <= 4:
        raise InvalidArity(f"order must be 2..4, got {k}")
    if len(set(vertices)) != k:
        raise InvalidTuple("repeated vertex")
    for v in vertices:
        g._check_vertex(v)
    acc = g.rows[vertices[0]].copy()
    for v in vertices[1:]:
        acc &= g.rows[v]
    return int(np.bitwise_count(acc).sum())


# file formats ------------------------------------------------------------


def write_prgb(g: Graph, path) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BQ", FORMAT_VERSION, g.n))
        fh.write(g.rows.astype("<u8").tobytes())


def read_prgb(path) -> Graph:
    data = Path(path).read_bytes()
    header = len(MAGIC) + 9
    if len(data) < header or data[:4] != MAGIC:
        raise GraphFormatError(f"{path}: not a PRGB file")
    version, n = struct.unpack("<BQ", data[4:header])
    if version != FORMAT_VERSION:
        raise GraphFormatError(f"{path}: unsupported PRGB version {version}")
    if n < 1:
        raise GraphFormatError(f"{path}: vertex count must be positive")
    W = words_for(n)
    expected = header + n * W * 8
    if len(data) != expected:
        raise GraphFormatError(f"{path}: expected {expected} bytes, found {len(data)}")
    rows = np.frombuffer(data, dtype="<u8", offset=header).astype(np.uint64).reshape(n, W)
    g = Graph(n, rows)
    try:
        g.check_invariants()
    except AssertionError as exc:
        raise GraphFormatError(f"{path}: {exc}") from None
    return g


def write_edgelist(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# n {g.n}\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def read_edgelist(path, n: int | None = None) -> Graph:
    """Parse ``u v`` lines; a ``# n N`` header comment fixes the vertex count."""
    edges = []
    header_n = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if text.startswith("#"):
                parts = text[1:].split()
                if len(parts) == 2 and parts[0] == "n":
                    header_n = int(parts[1])
                continue
            text = text.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected 'u v'")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: non-integer vertex") from None
    if n is None:
        n = header_n
    if n is None:
        n = 1 + max((max(e) for e in edges), default=0)
    return build_graph(n, edges)


def read_graph(path) -> Graph:
    """Dispatch on content: PRGB magic, otherwise edge-list text."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_prgb(path)
    try:
        return read_edgelist(path)
    except UnicodeDecodeError:
        raise GraphFormatError(f"{path}: unrecognised graph file") from None


def write_graph(g: Graph, path, fmt: str | None = None) -> None:
    if fmt is None:
        fmt = "edges" if str(path).endswith((".txt", ".edges", ".el")) else "prgb"
    if fmt == "prgb":
        write_prgb(g, path)
    elif fmt == "edges":
        write_edgelist(g, path)
    else:
        raise InvalidParameter(f"unknown graph format {fmt!r}")
