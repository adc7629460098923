import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from solenoidal_hup.params import (
    DomainError, GeneralizedParams, ProblemParams, as_generalized, best_constant_curlfree,
    best_constant_poloidal, best_constant_solenoidal, best_constant_toroidal,
    best_constant_unconstrained, constants_row,
)

dims = st.integers(min_value=3, max_value=50)
degrees = st.integers(min_value=1, max_value=20)


@pytest.mark.parametrize("N, expected", [(3, 2.25), (2, 1.0), (1, 0.25)])
def test_unconstrained(N, expected):
    assert best_constant_unconstrained(N) == expected


@pytest.mark.parametrize("N, expected", [(3, 6.25), (4, 9.0), (2, 4.0)])
def test_curlfree(N, expected):
    assert best_constant_curlfree(N) == expected


@pytest.mark.parametrize("N, expected", [(3, 6.25), (4, 9.0), (10, 36.0)])
def test_toroidal(N, expected):
    assert best_constant_toroidal(N) == expected


@pytest.mark.parametrize("N, nu, expected", [
    (3, 1, 6.25), (3, 2, 12.25), (4, 1, (math.sqrt(12) + 2) ** 2 / 4),
])
def test_poloidal(N, nu, expected):
    assert best_constant_poloidal(N, nu) == pytest.approx(expected, rel=1e-15)


def test_poloidal_n4_decimal():
    assert best_constant_poloidal(4, 1) == pytest.approx(7.464101615, abs=1e-9)


@pytest.mark.parametrize("N, expected", [
    (3, 6.25), (4, 7.464101615), (5, 9.373105626),
])
def test_solenoidal(N, expected):
    assert best_constant_solenoidal(N) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("fn", [best_constant_toroidal, best_constant_solenoidal])
def test_reject_low_dimension(fn):
    with pytest.raises(DomainError):
        fn(2)


@pytest.mark.parametrize("N, nu", [(2, 1), (3, 0), (3.5, 1)])
def test_poloidal_domain(N, nu):
    with pytest.raises(DomainError):
        best_constant_poloidal(N, nu)


def test_problem_params_values():
    p = ProblemParams(3, 1)
    assert (p.mu, p.eps, p.alpha_nu, p.b, p.c) == (2.5, 1.0, 2.0, 0.5, 2.5)


def test_problem_params_rejects():
    with pytest.raises(DomainError):
        ProblemParams(2, 1)
    with pytest.raises(DomainError):
        ProblemParams(3, 0)
    with pytest.raises(DomainError):
        ProblemParams(True, 1)


@pytest.mark.parametrize("mu, eps", [(2.0, 1.0), (2.0, 0.0), (-1.0, 0.1), (1.0, 0.3)])
def test_generalized_rejects(mu, eps):
    with pytest.raises(DomainError):
        GeneralizedParams(mu, eps)


def test_as_generalized_accepts_tuple():
    g = as_generalized((2.5, 1.0))
    assert g.b == 0.5 and g.c == 2.5
    assert as_generalized(ProblemParams(3, 1)) == g


@given(dims, degrees)
def test_problem_params_invariants(N, nu):
    p = ProblemParams(N, nu)
    assert p.mu > 2
    assert 0 < p.eps < p.mu**2 / 4
    assert 0 < p.b <= p.mu / 2
    assert p.c >= 1
    assert p.mu**2 - 4 * p.eps == pytest.approx((2 * nu + N - 2) ** 2 / 4 - (N - 3), rel=1e-13)


@given(dims, degrees)
def test_poloidal_equals_c_squared(N, nu):
    c = ProblemParams(N, nu).c
    assert abs(best_constant_poloidal(N, nu) - c * c) <= 1e-14 * c * c


@given(dims)
def test_ordering_chain(N):
    un, sol, cf = best_constant_unconstrained(N), best_constant_solenoidal(N), best_constant_curlfree(N)
    assert un < sol <= cf
    assert (sol == cf) == (N == 3)


@given(dims)
def test_selector_identity(N):
    cp, ct = best_constant_poloidal(N, 1), best_constant_toroidal(N)
    assert best_constant_solenoidal(N) == pytest.approx(min(cp, ct), rel=1e-15)
    if N == 3:
        assert cp == ct
    else:
        assert cp < ct


@given(st.integers(3, 30), st.integers(1, 15))
def test_monotone_in_degree(N, nu):
    assert best_constant_poloidal(N, nu + 1) > best_constant_poloidal(N, nu)


def test_constants_row():
    row = constants_row(3)
    assert row == {"n": 3, "unconstrained": 2.25, "curl_free": 6.25, "solenoidal": 6.25,
                   "poloidal": 6.25, "toroidal": 6.25}
    assert "solenoidal" not in constants_row(2)
