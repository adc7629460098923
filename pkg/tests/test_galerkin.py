import math
import warnings

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import IntegrationWarning, quad

from solenoidal_hup.functionals import r_quotients
from solenoidal_hup.galerkin import (
    AssemblyError, ConvergenceTable, EigenSolverError, assemble, basis_spec, build_basis,
    converge_constant, jacobi_eigh, solve,
)
from solenoidal_hup.params import ProblemParams, as_generalized, best_constant_poloidal

MU, EPS = 2.5, 1.0
# exp(-2) L_2^(2.5)(4) from the explicit coefficients of L_2
PHI2_AT_2 = -0.28758747687780197


def test_laguerre_first_members():
    phi = build_basis(3, MU)
    x = np.linspace(0, 6, 13)
    np.testing.assert_allclose(phi[0](x), np.exp(-x), rtol=1e-15)
    np.testing.assert_allclose(phi[1](x), np.exp(-x) * (MU + 1 - 2 * x), rtol=1e-14, atol=1e-15)
    explicit = math.exp(-2) * ((MU + 1) * (MU + 2) / 2 - (MU + 2) * 4 + 16 / 2)
    assert phi[2](2.0) == pytest.approx(explicit, rel=1e-14)
    assert phi[2](2.0) == pytest.approx(PHI2_AT_2, rel=1e-14)


@pytest.mark.parametrize("family", ["laguerre", "mapped_jacobi"])
def test_basis_derivatives(family):
    params = (MU, EPS)
    phi = build_basis(6, MU if family == "laguerre" else params, family)
    x = np.linspace(0.2, 8.0, 17)
    h = 1e-5
    for f in phi:
        np.testing.assert_allclose(f.d1(x), (f(x + h) - f(x - h)) / (2 * h), rtol=1e-6, atol=1e-9)
        np.testing.assert_allclose(f.d2(x), (f.d1(x + h) - f.d1(x - h)) / (2 * h), rtol=1e-6, atol=1e-9)


def test_mapped_jacobi_tail():
    spec = basis_spec(4, (MU, EPS))
    p = as_generalized((MU, EPS))
    assert spec.p == pytest.approx(p.mu - p.b)
    phi = build_basis(4, (MU, EPS), "mapped_jacobi")
    x = 1e6
    for f in phi:
        assert f(2 * x) / f(x) == pytest.approx(2.0**-spec.p, rel=1e-4)


@pytest.mark.parametrize("family", ["laguerre", "mapped_jacobi"])
def test_small_system_shape(family):
    sysm = assemble(2, (MU, EPS), family)
    assert sysm.A.shape == sysm.B.shape == (2, 2)
    np.testing.assert_array_equal(sysm.A, sysm.A.T)
    assert np.all(np.linalg.eigvalsh(sysm.B) > 0)


@pytest.mark.parametrize("family", ["laguerre", "mapped_jacobi"])
def test_entries_against_quad(family):
    K = 8
    sysm = assemble(K, (MU, EPS), family)
    phi = build_basis(K, MU if family == "laguerre" else (MU, EPS), family)
    pieces = ((0, 1), (1, 10), (10, np.inf))

    def integral(f):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            return sum(quad(f, a, b, limit=400, epsabs=0, epsrel=1e-13)[0] for a, b in pieces)

    scale_a, scale_b = np.max(np.abs(sysm.A)), np.max(np.abs(sysm.B))
    for j in range(K):
        for k in range(j, K):
            u, v = phi[j], phi[k]
            a = integral(lambda x: (u.d2(x) * v.d2(x) + u.d1(x) * v.d1(x)) * x ** (MU + 1)
                         - EPS * u(x) * v(x) * x ** (MU - 1))
            b = integral(lambda x: u.d1(x) * v.d1(x) * x**MU)
            assert abs(a - sysm.A[j, k]) <= 1e-10 * scale_a
            assert abs(b - sysm.B[j, k]) <= 1e-10 * scale_b


def test_assemble_rejects_bad_input():
    with pytest.raises(ValueError):
        assemble(1, (MU, EPS))
    with pytest.raises(ValueError):
        assemble(65, (MU, EPS))
    with pytest.raises(ValueError):
        assemble(4, (MU, EPS), family="chebyshev")
    assert issubclass(AssemblyError, ArithmeticError)


@given(st.integers(2, 20), st.integers(0, 2**32 - 1))
def test_jacobi_matches_eigh(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n))
    C = (M + M.T) / 2
    vals, vecs, _ = jacobi_eigh(C)
    np.testing.assert_allclose(vals, scipy.linalg.eigh(C, eigvals_only=True),
                               atol=1e-12 * np.linalg.norm(C))
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(C @ vecs, vecs * vals, atol=1e-11 * np.linalg.norm(C))


def test_jacobi_sweep_cap():
    rng = np.random.default_rng(3)
    M = rng.standard_normal((12, 12))
    with pytest.raises(EigenSolverError):
        jacobi_eigh(M + M.T, max_sweeps=1)


@pytest.mark.parametrize("family", ["laguerre", "mapped_jacobi"])
def test_pencil_eigenpair(family):
    sysm = solve(12, (MU, EPS), family)
    ref = scipy.linalg.eigh(sysm.A, sysm.B, eigvals_only=True)[0]
    assert sysm.lambda_min == pytest.approx(ref, rel=1e-10)
    assert sysm.residual() <= 1e-8
    assert sysm.coeffs @ sysm.B @ sysm.coeffs == pytest.approx(1.0, rel=1e-12)
    assert sysm.profile()(0.0) > 0


def test_lambda_min_examples():
    lam = solve(25, (MU, EPS)).lambda_min
    assert 2.5 <= lam <= 2.5 + 1e-6
    lam = solve(25, (3.0, 1.5)).lambda_min
    assert math.sqrt(3) + 1 <= lam <= math.sqrt(3) + 1 + 1e-6


@pytest.mark.parametrize("family", ["laguerre", "mapped_jacobi"])
def test_nested_spaces_monotone(family):
    lams = [solve(K, (MU, EPS), family).lambda_min for K in range(2, 17, 2)]
    assert np.all(np.diff(lams) <= 1e-12)
    assert min(lams) >= 2.5 - 1e-12


@given(st.floats(0.6, 6.0), st.floats(0.05, 0.95), st.integers(2, 20))
def test_variational_floor(mu, frac, K):
    p = as_generalized((mu, frac * mu * mu / 4))
    assert solve(K, p).lambda_min >= p.c - 1e-12 * p.c


@pytest.mark.parametrize("N, nu", [(3, 1), (4, 1), (5, 2)])
def test_converge_constant(N, nu):
    p = ProblemParams(N, nu)
    target = best_constant_poloidal(N, nu)
    table = converge_constant(p, 30, 1e-6)
    assert table.converged
    assert 0 <= table.final["gap"] <= 1e-6
    assert table.final["lambda_min_sq"] == pytest.approx(target, rel=1e-5)
    assert np.all(np.diff(table.lambdas) <= 0)


def test_converge_constant_n4_value():
    table = converge_constant(ProblemParams(4, 1), 30, 1e-6)
    assert table.final["lambda_min_sq"] == pytest.approx(4 + 2 * math.sqrt(3), rel=1e-6)


def test_unconverged_flag():
    table = converge_constant((MU, EPS), 6, 1e-12, family="laguerre")
    assert not table.converged
    assert table.ks == [2, 4, 6]


def test_table_csv():
    table = converge_constant((MU, EPS), 8, 1e-6)
    lines = table.to_csv().splitlines()
    assert lines[0] == ",".join(ConvergenceTable.COLUMNS)
    assert len(lines) == len(table.rows) + 1


def test_eigenvector_reproduces_quotient():
    sysm = solve(30, (MU, EPS))
    rep = r_quotients(sysm.profile(), (MU, EPS), tol=1e-11)
    assert rep.r_tilde == pytest.approx(sysm.lambda_min, rel=1e-8)


def test_laguerre_family_is_slow():
    lam = solve(25, (MU, EPS), "laguerre").lambda_min
    assert lam >= 2.5
    assert lam - 2.5 > 1e-4
