import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_dense, sign_matrices
from prgraph.errors import GraphFormatError, InvalidArity, InvalidEdge, InvalidTuple, InvalidVertex
from prgraph.graph import (
    Graph,
    VertexTuple,
    build_graph,
    codegree_order_k,
    generalized_neighborhood,
    neighborhood_in_set,
    read_graph,
    tuple_common_neighborhood,
    write_graph,
)

K3 = build_graph(3, [(0, 1), (1, 2), (0, 2)])
C4 = build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
K4 = Graph.complete(4)
K5 = Graph.complete(5)


def test_build_examples():
    assert K3.edge_count == 3
    assert build_graph(4, []).edge_count == 0
    with pytest.raises(InvalidEdge):
        build_graph(2, [(0, 0)])
    with pytest.raises(InvalidVertex):
        build_graph(3, [(0, 3)])


def test_duplicates_collapse():
    g = build_graph(3, [(0, 1), (1, 0), (0, 1)])
    assert g.edge_count == 1 and g.has_edge(1, 0)


def test_generalized_neighborhood_examples():
    assert generalized_neighborhood(K3, 0, 1) == {1, 2}
    assert generalized_neighborhood(K3, 0, 0) == set()
    assert generalized_neighborhood(C4, 0, 0) == {2}
    with pytest.raises(InvalidVertex):
        generalized_neighborhood(K3, 5, 1)


def test_neighborhood_in_set_examples():
    assert neighborhood_in_set(K4, 0, {1, 2}, 1) == 2
    assert neighborhood_in_set(K4, 0, {0, 1}, 1) == 1
    assert neighborhood_in_set(Graph.empty(5), 0, {1, 2, 3}, 0) == 3


def test_tuple_common_examples():
    assert tuple_common_neighborhood(K4, VertexTuple((0, 1), (1, 1))) == 2
    assert tuple_common_neighborhood(C4, VertexTuple((0, 2), (1, 1))) == 2
    assert tuple_common_neighborhood(K4, VertexTuple((0, 1, 2), (1, 1, 1))) == 1
    with pytest.raises(InvalidTuple):
        tuple_common_neighborhood(K4, VertexTuple((0, 0), (1, 1)))


def test_codegree_examples():
    assert codegree_order_k(K5, [0, 1]) == 3
    assert codegree_order_k(K5, [0, 1, 2, 3]) == 1
    star = build_graph(5, [(0, i) for i in range(1, 5)])
    assert codegree_order_k(star, [1, 2]) == 1
    with pytest.raises(InvalidArity):
        codegree_order_k(K5, [0])
    with pytest.raises(InvalidArity):
        codegree_order_k(K5, [0, 1, 2, 3, 4])


@pytest.mark.parametrize("seed", range(10))
def test_invariants_random(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 130))
    A = random_dense(rng, n, rng.random())
    g = Graph.from_dense(A)
    g.check_invariants()
    assert g.edge_count == A.sum() // 2
    assert np.array_equal(g.to_dense(), A)
    for v in range(0, n, max(1, n // 7)):
        assert len(generalized_neighborhood(g, v, 0)) + len(generalized_neighborhood(g, v, 1)) == n - 1


def test_all_ones_matches_codegree_on_100_graphs():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(5, 33))
        g = Graph.from_dense(random_dense(rng, n, rng.random()))
        for k in (2, 3, 4):
            vs = tuple(int(x) for x in rng.choice(n, k, replace=False))
            assert tuple_common_neighborhood(g, VertexTuple(vs, (1,) * k)) == codegree_order_k(g, vs)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 20), st.integers(1, 5))
def test_symmetry_and_monotonicity(seed, n, r):
    rng = np.random.default_rng(seed)
    A = random_dense(rng, n)
    g = Graph.from_dense(A)
    r = min(r, n)
    vs = tuple(int(x) for x in rng.choice(n, r, replace=False))
    xi = tuple(int(x) for x in rng.integers(0, 2, r))
    f = tuple_common_neighborhood(g, VertexTuple(vs, xi))
    perm = rng.permutation(r)
    assert f == tuple_common_neighborhood(g, VertexTuple(tuple(vs[i] for i in perm), tuple(xi[i] for i in perm)))
    M = sign_matrices(A)
    acc = np.ones(n, bool)
    for v, x in zip(vs, xi):
        acc &= M[x][v]
    assert f == acc.sum()
    rest = [v for v in range(n) if v not in vs]
    if rest:
        f2 = tuple_common_neighborhood(g, VertexTuple(vs + (rest[0],), xi + (int(rng.integers(0, 2)),)))
        assert f2 <= f


def test_padding_bits_zero():
    g = Graph.complete(70)
    g.check_invariants()
    assert int(g.rows[0, 1]) >> 6 == 0


@pytest.mark.parametrize("fmt", ["prgb", "edges"])
def test_round_trip(tmp_path, fmt):
    rng = np.random.default_rng(3)
    g = Graph.from_dense(random_dense(rng, 77))
    path = tmp_path / f"g.{fmt}"
    write_graph(g, path, fmt)
    assert read_graph(path) == g


def test_prgb_layout(tmp_path):
    g = build_graph(3, [(0, 1)])
    path = tmp_path / "g.prgb"
    write_graph(g, path)
    raw = path.read_bytes()
    assert raw[:4] == b"PRGB" and raw[4] == 1
    assert int.from_bytes(raw[5:13], "little") == 3
    assert len(raw) == 13 + 3 * 8
    assert int.from_bytes(raw[13:21], "little") == 0b10


def test_corrupt_files(tmp_path):
    g = Graph.complete(10)
    path = tmp_path / "g.prgb"
    write_graph(g, path)
    raw = path.read_bytes()
    (tmp_path / "t.prgb").write_bytes(raw[:-3])
    with pytest.raises(GraphFormatError):
        read_graph(tmp_path / "t.prgb")
    bad = bytearray(raw)
    bad[13] |= 1  # self-loop on vertex 0
    (tmp_path / "b.prgb").write_bytes(bytes(bad))
    with pytest.raises(GraphFormatError):
        read_graph(tmp_path / "b.prgb")
    (tmp_path / "x.edges").write_text("0 1\n1 banana\n")
    with pytest.raises(GraphFormatError):
        read_graph(tmp_path / "x.edges")


def test_edge_list_comments(tmp_path):
    (tmp_path / "g.txt").write_text("# a triangle\n0 1\n1 2 # trailing\n\n2 0\n")
    assert read_graph(tmp_path / "g.txt") == K3


def test_graph_is_immutable():
    with pytest.raises(ValueError):
        K4.rows[0, 0] = 0
