import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from prgraph.errors import InvalidParameter, PreconditionFailed
from prgraph.geometric import (
    beta_quantile,
    bivariate_tail_mc,
    dglu_check,
    dglu_gap,
    edge_probability_mc,
    gaussian_norm_check,
    incomplete_beta,
    normal_cdf,
    normal_quantile,
    normal_sf,
    reflect_negative_rho,
    tau_n,
    threshold_tpd,
    validation_battery,
    willink_bounds,
    willink_bounds_negative,
)


def _mp_cdf(x):
    mpmath.mp.dps = 40
    return float(mpmath.ncdf(x))


# normal ------------------------------------------------------------------------------


def test_normal_examples():
    assert normal_cdf(0) == 0.5
    assert normal_quantile(normal_cdf(1.7)) == pytest.approx(1.7, abs=1e-8)
    mpmath.mp.dps = 40
    ref = float(mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf("0.975") - 1))
    assert ref == pytest.approx(1.959963984540054, abs=1e-14)
    assert normal_quantile(0.975) == pytest.approx(ref, abs=1e-9)
    for u in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(InvalidParameter):
            normal_quantile(u)


@pytest.mark.parametrize("x", np.linspace(-8, 8, 41))
def test_normal_cdf_against_mpmath(x):
    assert abs(normal_cdf(x) - _mp_cdf(x)) <= 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 30))
def test_normal_cdf_symmetry(x):
    assert abs(normal_cdf(x) + normal_cdf(-x) - 1) <= 1e-12
    assert normal_sf(x) == pytest.approx(normal_cdf(-x), rel=1e-15, abs=0)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-10, 1 - 1e-10))
def test_quantile_inverts_cdf(u):
    assert normal_cdf(normal_quantile(u)) == pytest.approx(u, rel=1e-9, abs=1e-15)


# incomplete beta ----------------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.floats(0.05, 5000), st.floats(0.05, 5000))
def test_incomplete_beta_against_scipy(x, a, b):
    assert abs(incomplete_beta(x, a, b) - special.betainc(a, b, x)) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6), st.sampled_from([0.5]), st.floats(0.5, 5000))
def test_beta_quantile_against_scipy(q, a, b):
    ref = special.betaincinv(a, b, q)
    assert abs(beta_quantile(q, a, b) - ref) <= 1e-9
    assert incomplete_beta(beta_quantile(q, a, b), a, b) == pytest.approx(q, abs=1e-10)


def test_incomplete_beta_against_mpmath_large_shape():
    mpmath.mp.dps = 40
    for x, a, b in [(0.001, 0.5, 4999.5), (0.3, 0.5, 2.5), (0.9, 3, 7)]:
        ref = float(mpmath.betainc(a, b, 0, x, regularized=True))
        assert incomplete_beta(x, a, b) == pytest.approx(ref, abs=1e-12)


# threshold -----------------------------------------------------------------------------


@pytest.mark.parametrize("d", [2, 3, 10, 1000, 10**6])
def test_threshold_half_is_zero(d):
    assert threshold_tpd(0.5, d).t == 0.0


def test_threshold_examples():
    assert threshold_tpd(0.25, 3).t == pytest.approx(0.5, abs=1e-10)
    # d = 3: first coordinate uniform on [-1, 1], so t = 1 - 2p
    for p in (0.05, 0.1, 0.2, 0.4):
        assert threshold_tpd(p, 3).t == pytest.approx(1 - 2 * p, abs=1e-10)
    # d = 2: T = cos(angle) with uniform angle, so t = cos(pi p)
    for p in (0.1, 0.3):
        assert threshold_tpd(p, 2).t == pytest.approx(math.cos(math.pi * p), abs=1e-10)
    with pytest.raises(InvalidParameter):
        threshold_tpd(0.6, 10)
    with pytest.raises(InvalidParameter):
        threshold_tpd(0.3, 1)


@pytest.mark.parametrize("p,d", [(0.1, 5), (0.3, 50), (0.01, 1000), (0.45, 10**5)])
def test_threshold_defining_property(p, d):
    t = threshold_tpd(p, d).t
    # P(T >= t) for T = Z1/|Z|: half the Beta(1/2,(d-1)/2) upper tail of t^2
    tail = 0.5 * special.betaincc(0.5, (d - 1) / 2, t * t)
    assert tail == pytest.approx(p, abs=1e-10)


def test_threshold_decreasing_in_p():
    for d in (3, 50, 1000):
        ts = [threshold_tpd(p, d).t for p in np.linspace(0.01, 0.5, 50)]
        assert all(a > b for a, b in zip(ts, ts[1:]))


def test_threshold_scaled_converges():
    ds = [100 * 2**i for i in range(12)]
    for p in (0.1, 0.3):
        gaps = [dglu_gap(p, d) for d in ds]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))


@pytest.mark.parametrize("p,d", [(0.1, 50), (0.3, 500), (0.5, 10)])
def test_edge_probability_mc(p, d):
    est = edge_probability_mc(p, d, 10**6, seed=3)
    assert abs(est.estimate - p) <= 5 * math.sqrt(p * (1 - p) / 10**6)


def test_edge_probability_mc_deterministic():
    assert edge_probability_mc(0.2, 30, 5000, 9) == edge_probability_mc(0.2, 30, 5000, 9)


# threshold bound and tau ---------------------------------------------------------------


def test_threshold_bound_examples():
    assert dglu_check(0.5, 27, 0.0)
    assert dglu_check(0.3, 100, 5.0)
    for d in (1000, 10**4):
        assert dglu_check(0.3, d, 5.0)
    with pytest.raises(PreconditionFailed):
        dglu_check(0.3, 20)
    with pytest.raises(PreconditionFailed):
        dglu_check(0.5, 26)


def test_threshold_gap_at_large_d():
    t = threshold_tpd(0.3, 10**4).t
    assert abs(t * 100 - normal_quantile(0.7)) <= 5 * math.sqrt(math.log(1e4) / 1e4)


def test_tau_examples():
    exact = 10 * (math.sqrt(math.log(1e6) / 1e6) + 1e-8)
    assert tau_n(10**4, 10**6, 0.3, 10) == pytest.approx(exact, rel=1e-14)
    # the quoted 0.037171 agrees to its printed precision with the formula value 0.0371693
    assert tau_n(10**4, 10**6, 0.3, 10) == pytest.approx(0.037171, abs=2e-6)
    n = math.exp(math.e)
    assert tau_n(int(n) + 1, 3, 0.3, 2.0) == pytest.approx(2.0 * (math.sqrt(math.log(int(n) + 1) / 3) + 1 / (int(n) + 1) ** 2))
    assert tau_n(100, 10**300, 0.3, 10) == pytest.approx(10 / 100**2, rel=1e-6)
    with pytest.raises(InvalidParameter):
        tau_n(1, 10, 0.3)
    with pytest.raises(InvalidParameter):
        tau_n(10, 10, 0.3, 0)


# bivariate bracket ------------------------------------------------------------------------


def _bvn_tail(h, rho):
    mvn = stats.multivariate_normal([0, 0], [[1, rho], [rho, 1]])
    # P(X >= h, Y >= h) = P(-X <= -h, -Y <= -h)
    return float(mvn.cdf([-h, -h]))


def test_bracket_examples():
    lo, hi = willink_bounds(1.3, 0.0)
    assert lo == hi == pytest.approx(normal_sf(1.3) ** 2)
    lo, hi = willink_bounds(1.0, 0.5)
    base = normal_cdf(-1) * normal_cdf(-1 / math.sqrt(3))
    assert lo == pytest.approx(base, rel=1e-14) and hi == pytest.approx(1.5 * base, rel=1e-14)
    for args in ((0.0, 0.3), (-1, 0.3), (1, 1.0), (1, -0.2)):
        with pytest.raises(InvalidParameter):
            willink_bounds(*args)


@pytest.mark.parametrize("h", [0.3, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("rho", [0.0, 0.2, 0.5, 0.9])
def test_bracket_contains_scipy_value(h, rho):
    lo, hi = willink_bounds(h, rho)
    ref = _bvn_tail(h, rho)
    assert lo <= ref * (1 + 1e-6) and ref <= hi * (1 + 1e-6)


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("rho", [-0.8, -0.3, -0.05])
def test_negative_rho_reflection_and_bracket(h, rho):
    ref = _bvn_tail(h, rho)
    assert reflect_negative_rho(h, rho, _bvn_tail) == pytest.approx(ref, rel=1e-5, abs=1e-9)
    lo, hi = willink_bounds_negative(h, rho)
    assert lo <= ref + 1e-9 and ref <= hi + 1e-9


def test_quadrant_probabilities_mc():
    est = bivariate_tail_mc(0.0, 0.0, 10**6, seed=1)
    assert abs(est.estimate - 0.25) <= 5 * est.stderr
    est = bivariate_tail_mc(0.0, 0.99, 10**6, seed=2)
    target = 0.25 + math.asin(0.99) / (2 * math.pi)
    assert target == pytest.approx(0.4775, abs=1e-4)
    assert abs(est.estimate - target) <= 5 * est.stderr


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("rho", [0.0, 0.3, 0.8])
def test_mc_within_bracket(h, rho):
    lo, hi = willink_bounds(h, rho)
    est = bivariate_tail_mc(h, rho, 10**6, seed=int(10 * h + 100 * rho))
    assert lo - 5 * est.stderr <= est.estimate <= hi + 5 * est.stderr


def test_mc_preconditions():
    with pytest.raises(InvalidParameter):
        bivariate_tail_mc(0.5, 0.5, 999, 0)
    with pytest.raises(InvalidParameter):
        bivariate_tail_mc(0.5, 1.0, 10**4, 0)


# norm concentration -----------------------------------------------------------------------


def test_norm_check_examples():
    assert gaussian_norm_check(10**4, 10**5, seed=0).passed
    small = gaussian_norm_check(4, 10**5, seed=0)
    assert small.passed
    empty = gaussian_norm_check(100, 0, seed=0)
    assert empty.passed and empty.warning


def test_norm_check_small_eps_bound_clamped():
    nc = gaussian_norm_check(50, 10**4, seed=1, eps=0.5)
    assert nc.allowed >= 1.0 and nc.passed and 0 <= nc.failure_rate <= 1


def test_validation_battery():
    out = validation_battery(seed=0, mc_samples=200_000)
    assert out["all_pass"], [c for c in out["checks"] if not c["pass"]]
