import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prgraph.ergm import (
    ErgmModel,
    Regime,
    concentration_experiment,
    glauber_conditional,
    hamiltonian,
    phi_beta,
    solve_fixed_point,
    triangle_count,
)
from prgraph.errors import InvalidParameter
from prgraph.generators import gen_er, gen_ergm
from prgraph.graph import Graph, build_graph


def test_hamiltonian_examples():
    K3 = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert hamiltonian(K3, ErgmModel(1, 3)) == pytest.approx(4)
    assert hamiltonian(Graph.empty(6), ErgmModel(2.5, -7)) == 0
    assert hamiltonian(Graph.complete(4), ErgmModel(0, 4)) == pytest.approx(4)


def test_triangle_count_matches_trace():
    g = gen_er(40, 0.4, 1)
    A = g.to_dense().astype(np.int64)
    assert triangle_count(g) == np.trace(A @ A @ A) // 6


def test_phi_examples():
    assert phi_beta(ErgmModel(0, 0), 0.7) == 0.5
    assert phi_beta(ErgmModel(-2, 4), 0.25) == pytest.approx(1 / (1 + math.e), abs=1e-12)
    vals = [phi_beta(ErgmModel(b, 1), 0.3) for b in (-1, -10, -100, -1000)]
    assert all(a > b for a, b in zip(vals, vals[1:])) and vals[-1] >= 0
    assert 0 <= phi_beta(ErgmModel(800, 1), 1.0) <= 1


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20), st.floats(0.01, 20), st.floats(-5, 5), st.floats(0.001, 3))
def test_phi_increasing_in_x(beta, gamma, x, h):
    m = ErgmModel(beta, gamma)
    assert phi_beta(m, x + h) >= phi_beta(m, x)
    assert 0 <= phi_beta(m, x) <= 1


@settings(max_examples=60, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 1))
def test_glauber_conditional_is_phi(beta, gamma, L):
    m = ErgmModel(beta, gamma)
    assert glauber_conditional(m, L) == phi_beta(m, L)


def test_glauber_examples():
    assert glauber_conditional(ErgmModel(0, 0), 0.9) == 0.5
    assert glauber_conditional(ErgmModel(-2, 4), 0.25) == pytest.approx(0.26894, abs=1e-5)
    assert glauber_conditional(ErgmModel(1.3, 9), 0.0) == pytest.approx(math.exp(1.3) / (1 + math.exp(1.3)))
    with pytest.raises(InvalidParameter):
        glauber_conditional(ErgmModel(0, 0), 1.5)


def test_fixed_point_examples():
    r = solve_fixed_point(ErgmModel(0, 0))
    assert r.roots == [pytest.approx(0.5)] and r.slopes == [0.0] and r.regime is Regime.HIGH_TEMPERATURE
    r = solve_fixed_point(ErgmModel(-2, 4))
    assert len(r.roots) == 1 and r.regime is Regime.HIGH_TEMPERATURE
    assert r.roots[0] == pytest.approx(0.126, abs=5e-4)
    assert r.slopes[0] == pytest.approx(0.111, abs=5e-4)
    r = solve_fixed_point(ErgmModel(0.7, 0))
    assert r.roots == [pytest.approx(math.exp(0.7) / (1 + math.exp(0.7)), abs=1e-12)]
    assert r.slopes == [0.0]
    with pytest.raises(InvalidParameter):
        solve_fixed_point(ErgmModel(0, 0), tol=0)


def test_fixed_point_against_scipy_brentq():
    from scipy.optimize import brentq

    m = ErgmModel(-2, 4)
    ref = brentq(lambda p: phi_beta(m, p * p) - p, 1e-9, 1 - 1e-9, xtol=1e-15)
    assert solve_fixed_point(m).roots[0] == pytest.approx(ref, abs=1e-10)


def test_multiple_roots_low_temperature():
    r = solve_fixed_point(ErgmModel(-10, 20))
    assert len(r.roots) == 3 and r.regime is Regime.NOT_HIGH_TEMPERATURE


@settings(max_examples=40, deadline=None)
@given(st.floats(-6, 3), st.floats(-6, 12))
def test_roots_are_fixed_points_and_count_odd(beta, gamma):
    m = ErgmModel(beta, gamma)
    r = solve_fixed_point(m, grid=2000)
    for p in r.roots:
        # bisection runs on u = p^2, so the residual in p scales like tol / (2p)
        assert abs(phi_beta(m, p * p) - p) <= 1e-10
    assert len(r.roots) % 2 == 1 or r.regime is not Regime.HIGH_TEMPERATURE


def test_slope_formula_matches_finite_difference():
    m = ErgmModel(-1.5, 3.0)
    p = solve_fixed_point(m).roots[0]
    h = 1e-6
    fd = (phi_beta(m, (p + h) ** 2) - phi_beta(m, (p - h) ** 2)) / (2 * h)
    assert solve_fixed_point(m).slopes[0] == pytest.approx(fd, rel=1e-6)


def test_concentration_er_reference():
    rep = concentration_experiment(ErgmModel(0, 0), 256, 2, 5, seed=1)
    assert rep.regime == "HighTemperature" and rep.p_star == pytest.approx(0.5)
    assert rep.K_deg <= 3 and rep.K_codeg <= 3
    d = rep.to_dict()
    assert {"beta", "gamma", "p_star", "slope", "regime", "replicas"} <= set(d)
    assert set(d["replicas"][0]) >= {"max_deg_dev_norm", "max_codeg_dev_norm"}


@pytest.mark.slow
def test_concentration_edge_triangle():
    rep = concentration_experiment(ErgmModel(-2, 4), 256, 500, 1, seed=2)
    assert rep.K_deg <= 10 and rep.K_codeg <= 10


def test_concentration_tiny_and_warning():
    rep = concentration_experiment(ErgmModel(0, 0), 2, 1, 1, seed=0)
    assert math.isfinite(rep.replicas[0].max_codeg_dev_norm)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        concentration_experiment(ErgmModel(-10, 20), 20, 1, 1, seed=0)
    assert any("NotHighTemperature" in str(x.message) for x in w)
