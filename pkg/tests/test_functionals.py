import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from solenoidal_hup.functionals import (
    DegenerateProfileError, DivergentIntegralError, RadialProfile, balance_scaling, dmu_norm,
    i_functional, identity_residual, p_beta, poly_exp_profile, q_form, r_quotients,
)
from solenoidal_hup.params import as_generalized
from solenoidal_hup.special import extremal_profile

MU, EPS = 2.5, 1.0
E = poly_exp_profile([1.0], 1.0)

# mpmath quadrature of g = (1 + x) e^{-x} at mu = 3.2, eps = 1.1
ONE_PLUS_X = {"i": 0.49792496068930825, "p0": 2.3043214892531592,
              "p1": 4.9498598144149593, "q": 3.4210311340450748}


def gm(s, rate=2.0):
    """int_0^inf x^(s-1) e^{-rate x} dx."""
    return gamma(s) / rate**s


def strip_exact(g):
    """Same profile without the closed-form route."""
    return RadialProfile(g.value, g.d1, g.d2, decay=None)


def coeff_lists():
    return st.lists(st.floats(-2, 2), min_size=1, max_size=5).filter(
        lambda c: any(abs(v) > 0.05 for v in c[1:]) or abs(c[0]) > 0.05)


def params_st():
    return st.tuples(st.floats(0.6, 6.0), st.floats(0.05, 0.95)).map(
        lambda t: as_generalized((t[0], t[1] * t[0] ** 2 / 4)))


def test_gamma_oracles_exp():
    assert p_beta(E, (MU, EPS), 0) == pytest.approx(gm(MU + 1), rel=1e-13)
    assert p_beta(E, (MU, EPS), 1) == pytest.approx(gm(MU + 2) - EPS * gm(MU), rel=1e-13)
    assert q_form(E, (MU, EPS)) == pytest.approx(gm(MU + 2), rel=1e-13)


def test_gamma_oracles_x_exp():
    g = poly_exp_profile([0.0, 1.0], 1.0)
    # g'' = (x - 2) e^{-x}
    exact = gm(MU + 4) - 4 * gm(MU + 3) + 4 * gm(MU + 2)
    assert q_form(g, (MU, EPS)) == pytest.approx(exact, rel=1e-13)


def test_exp_profile_decimals():
    assert p_beta(E, (MU, EPS), 0) == pytest.approx(0.29374550093332035, rel=1e-13)
    assert p_beta(E, (MU, EPS), 1) == pytest.approx(0.27905822588665433, rel=1e-13)
    assert q_form(E, (MU, EPS)) == pytest.approx(0.51405462663331061, rel=1e-13)


def test_constant_and_linear_profiles():
    const = poly_exp_profile([1.0], 0.0)
    assert p_beta(const, (MU, EPS), 0) == 0.0
    lin = poly_exp_profile([0.0, 1.0], 0.0)
    assert q_form(lin, (MU, EPS)) == 0.0
    with pytest.raises(DivergentIntegralError):
        p_beta(lin, (MU, EPS), 0)


def test_one_plus_x_oracle():
    g = poly_exp_profile([1.0, 1.0], 1.0)
    p = (3.2, 1.1)
    vals = {"i": i_functional(g, p), "p0": p_beta(g, p, 0),
            "p1": p_beta(g, p, 1), "q": q_form(g, p)}
    for k, v in vals.items():
        assert v == pytest.approx(ONE_PLUS_X[k], rel=1e-13), k
    c = as_generalized(p).c
    assert vals["q"] + vals["p1"] - c * vals["p0"] == pytest.approx(vals["i"], rel=1e-12)
    assert identity_residual(g, p) == pytest.approx(ONE_PLUS_X["i"], rel=1e-13)


def test_adaptive_route_matches_exact():
    g = poly_exp_profile([1.0, -0.5, 0.3], 1.3)
    h = strip_exact(g)
    p = (3.2, 1.1)
    for fn in (lambda u: p_beta(u, p, 0), lambda u: p_beta(u, p, 1),
               lambda u: q_form(u, p), lambda u: i_functional(u, p)):
        assert fn(h) == pytest.approx(fn(g), rel=1e-9, abs=1e-11)


def test_extremal_quotients():
    rep = r_quotients(extremal_profile((MU, EPS)), (MU, EPS))
    assert rep.r == pytest.approx(1.5625, rel=1e-9)
    assert rep.r_tilde == pytest.approx(2.5, rel=1e-9)
    assert abs(rep.i_residual) <= 1e-10
    assert r_quotients(E, (MU, EPS)).r > 1.5625


def test_identity_residual_extremal():
    assert abs(identity_residual(extremal_profile((MU, EPS), 1.0), (MU, EPS))) <= 1e-10
    assert identity_residual(extremal_profile((MU, EPS), 2.0), (MU, EPS)) > 1e-3


def test_balance_scaling():
    lam, rt = balance_scaling(extremal_profile((MU, EPS)), (MU, EPS))
    assert lam == pytest.approx(1.0, rel=1e-8)
    assert rt == pytest.approx(2.5, rel=1e-9)
    g = poly_exp_profile([1.0], 2.0)
    r = r_quotients(g, (MU, EPS)).r
    lam, rt = balance_scaling(g, (MU, EPS))
    assert rt == pytest.approx(2 * math.sqrt(r), rel=1e-12)
    scaled = g.rescaled(lam * lam)
    assert q_form(scaled, (MU, EPS)) == pytest.approx(p_beta(scaled, (MU, EPS), 1), rel=1e-12)


def test_dmu_norm():
    assert dmu_norm(poly_exp_profile([0.0], 1.0), MU) == 0.0
    exact = math.sqrt(4 * gm(MU + 2) + gm(MU + 2) + gm(MU + 1) + gm(MU))
    assert dmu_norm(E, MU) == pytest.approx(exact, rel=1e-13)
    assert dmu_norm(E, MU) == pytest.approx(1.7604019526365363, rel=1e-13)
    assert math.isfinite(dmu_norm(extremal_profile((MU, EPS)), MU))


def test_degenerate_profile():
    with pytest.raises(DegenerateProfileError):
        r_quotients(poly_exp_profile([0.0], 1.0), (MU, EPS))


def test_beta_argument():
    with pytest.raises(ValueError):
        p_beta(E, (MU, EPS), 2)


@given(coeff_lists(), st.floats(0.3, 3.0), params_st())
def test_sharp_bound(coeffs, rate, p):
    g = poly_exp_profile(coeffs, rate)
    q, p1, p0 = q_form(g, p), p_beta(g, p, 1), p_beta(g, p, 0)
    assert q * p1 >= (p.c**2 / 4) * p0**2 * (1 - 1e-9)


@given(coeff_lists(), st.floats(0.3, 3.0), params_st(), st.floats(0.25, 4.0))
def test_quotient_scale_invariant(coeffs, rate, p, lam):
    g = poly_exp_profile(coeffs, rate)
    assert r_quotients(g.rescaled(lam), p).r == pytest.approx(r_quotients(g, p).r, rel=1e-9)


@given(coeffs=coeff_lists(), rate=st.floats(0.3, 3.0), p=params_st())
def test_am_gm(coeffs, rate, p):
    rep = r_quotients(poly_exp_profile(coeffs, rate), p)
    assert rep.r_tilde**2 / 4 >= rep.r * (1 - 1e-12)


@settings(max_examples=20)
@given(coeff_lists(), st.floats(0.3, 3.0), params_st())
def test_identity_holds(coeffs, rate, p):
    g = poly_exp_profile(coeffs, rate)
    i_val = i_functional(g, p)
    q, p1, p0 = q_form(g, p), p_beta(g, p, 1), p_beta(g, p, 0)
    scale = 1 + abs(i_val) + abs(q) + abs(p1) + p.c * abs(p0)
    assert abs(i_val - (q + p1 - p.c * p0)) <= 1e-10 * scale
    assert i_val >= -1e-12 * scale
