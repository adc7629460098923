"""Weighted one-dimensional functionals of a radial profile g on (0, inf).

    P_beta[g] = int (x^2 g'^2 - beta eps g^2) x^(mu+beta-2) dx     beta in {0, 1}
    Q[g]      = int g''^2 x^(mu+1) dx
    I[g]      = int (x g'' + (x+mu) g' + (mu-b) g)^2 x^(mu-1) dx
    R[g]      = Q P_1 / P_0^2,   R~[g] = (Q + P_1) / P_0

with b = (mu - sqrt(mu^2 - 4 eps))/2 and c = sqrt(mu^2 - 4 eps) + 1.  The
identity I = Q + P_1 - c P_0 is the cross-check every evaluation can run.

Profiles of the form p(x) exp(-lam x) are integrated exactly with a
generalized Gauss-Laguerre rule; everything else goes to the adaptive
log-scale integrator using the profile's algebraic decay order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from .params import as_generalized
from .quadrature import gauss_laguerre_rule, integrate_halfline
from .special import ExtremalProfile

DEFAULT_TOL = 1e-10


class DegenerateProfileError(ValueError):
    """P_0[g] vanishes (g is numerically constant) or a scaling is undefined."""


class DivergentIntegralError(ValueError):
    """The profile's decay is too slow for the requested weighted integral."""


class IdentityCheckError(ArithmeticError):
    """I[g] disagrees with Q + P_1 - c P_0 beyond the stated tolerance."""


@dataclass(frozen=True)
class RadialProfile:
    """A test function g with analytic g' and g''.

    ``decay`` is the algebraic order q in g ~ x^q at infinity, or None when
    g decays exponentially.  ``x_max`` bounds where the callables may be
    evaluated.  ``poly_exp`` holds (coefficients, rate) when
    g = p(x) exp(-rate x), which enables the exact quadrature route.
    """

    value: Callable
    d1: Callable
    d2: Callable
    decay: float | None = None
    x_max: float = math.inf
    poly_exp: tuple | None = None

    def __call__(self, x):
        return self.value(x)

    def rescaled(self, lam: float) -> "RadialProfile":
        """g_lam(x) = g(lam x)."""
        v, d1, d2 = self.value, self.d1, self.d2
        poly_exp = None
        if self.poly_exp is not None:
            coeffs, rate = self.poly_exp
            coeffs = np.asarray(coeffs, float) * lam ** np.arange(len(coeffs))
            poly_exp = (coeffs, rate * lam)
        return RadialProfile(
            lambda x: v(lam * np.asarray(x)),
            lambda x: lam * d1(lam * np.asarray(x)),
            lambda x: lam * lam * d2(lam * np.asarray(x)),
            decay=self.decay,
            x_max=self.x_max / lam,
            poly_exp=poly_exp,
        )


def poly_exp_profile(coeffs, rate: float) -> RadialProfile:
    """g(x) = (sum_k coeffs[k] x^k) exp(-rate x)."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if coeffs.size == 0:
        coeffs = np.zeros(1)
    p = Polynomial(coeffs)
    p1, p2 = p.deriv(1), p.deriv(2)
    lam = float(rate)
    if lam < 0:
        raise ValueError("rate must be nonnegative")

    def value(x):
        x = np.asarray(x, dtype=float)
        return p(x) * np.exp(-lam * x)

    def d1(x):
        x = np.asarray(x, dtype=float)
        return (p1(x) - lam * p(x)) * np.exp(-lam * x)

    def d2(x):
        x = np.asarray(x, dtype=float)
        return (p2(x) - 2 * lam * p1(x) + lam * lam * p(x)) * np.exp(-lam * x)

    return RadialProfile(value, d1, d2, decay=None, poly_exp=(coeffs, lam))


def extremal_radial_profile(profile: ExtremalProfile) -> RadialProfile:
    spec = profile.spec
    return RadialProfile(profile.value, profile.d1, profile.d2,
                         decay=spec.b - spec.mu, x_max=profile.x_max)


def as_profile(g) -> RadialProfile:
    if isinstance(g, RadialProfile):
        return g
    if isinstance(g, ExtremalProfile):
        return extremal_radial_profile(g)
    raise TypeError(f"cannot use {type(g).__name__} as a radial profile")


def linear_combination(profiles, coeffs) -> RadialProfile:
    """sum_k coeffs[k] * profiles[k], keeping the slowest decay order."""
    profiles = [as_profile(p) for p in profiles]
    coeffs = np.asarray(coeffs, dtype=float)

    def combo(attr):
        fns = [getattr(p, attr) for p in profiles]
        return lambda x: sum(ck * f(x) for ck, f in zip(coeffs, fns))

    decays = [p.decay for p in profiles]
    decay = None if all(d is None for d in decays) else max(d for d in decays if d is not None)
    return RadialProfile(combo("value"), combo("d1"), combo("d2"), decay=decay,
                         x_max=min(p.x_max for p in profiles))


# Each integrand is given as (pointwise formula, tail power offset).  The
# offset is the exponent of the integrand at infinity minus twice the decay
# order q of g: e.g. g'^2 x^mu ~ x^(2q - 2 + mu).
def _p0(x, g, g1, g2, mu, eps, b):
    return g1 * g1 * x**mu


def _p1(x, g, g1, g2, mu, eps, b):
    return (x * x * g1 * g1 - eps * g * g) * x ** (mu - 1)


def _q(x, g, g1, g2, mu, eps, b):
    return g2 * g2 * x ** (mu + 1)


def _i(x, g, g1, g2, mu, eps, b):
    r = x * g2 + (x + mu) * g1 + (mu - b) * g
    return r * r * x ** (mu - 1)


def _norm_d1(x, g, g1, g2, mu, eps, b):
    return g1 * g1 * (x + 1) * x**mu


def _norm_g(x, g, g1, g2, mu, eps, b):
    return g * g * x ** (mu - 1)


_TAIL_OFFSET = {
    _p0: lambda mu: mu - 2,
    _p1: lambda mu: mu - 1,
    _q: lambda mu: mu - 3,
    _i: lambda mu: mu - 1,
    _norm_d1: lambda mu: mu - 1,
    _norm_g: lambda mu: mu - 1,
}


# Polynomial parts for g = p exp(-lam x).  The exp(-2 lam x) x^(mu-1) factor
# is absorbed into the Laguerre weight after t = 2 lam x.
def _poly_parts(coeffs, lam):
    p = Polynomial(coeffs)
    p1 = p.deriv(1) - lam * p
    p2 = p.deriv(2) - 2 * lam * p.deriv(1) + lam * lam * p
    return p, p1, p2


_X = Polynomial([0.0, 1.0])
_POLY_INTEGRAND = {
    _p0: lambda p, p1, p2, mu, eps, b: _X * p1 * p1,
    _p1: lambda p, p1, p2, mu, eps, b: _X * _X * p1 * p1 - eps * p * p,
    _q: lambda p, p1, p2, mu, eps, b: _X * _X * p2 * p2,
    _i: lambda p, p1, p2, mu, eps, b: (_X * p2 + (_X + mu) * p1 + (mu - b) * p) ** 2,
    _norm_d1: lambda p, p1, p2, mu, eps, b: (_X + 1) * _X * p1 * p1,
    _norm_g: lambda p, p1, p2, mu, eps, b: p * p,
}


def _exact(integrand, g: RadialProfile, mu, eps, b) -> float:
    coeffs, lam = g.poly_exp
    poly = _POLY_INTEGRAND[integrand](*_poly_parts(coeffs, lam), mu, eps, b)
    poly = poly.trim()
    if not np.any(poly.coef):
        return 0.0
    if lam <= 0:
        raise DivergentIntegralError("polynomial profile without exponential decay")
    n = poly.degree() // 2 + 3
    rule = gauss_laguerre_rule(mu - 1, n)
    t = rule.nodes
    return rule.integrate(poly(t / (2 * lam))) / (2 * lam) ** mu


def _integral(integrand, g, params, tol):
    g = as_profile(g)
    p = as_generalized(params)
    mu, eps, b = p.mu, p.eps, p.b
    if g.poly_exp is not None:
        return _exact(integrand, g, mu, eps, b), 0.0
    if g.decay is None:
        tail = -50.0
    else:
        tail = 2 * g.decay + _TAIL_OFFSET[integrand](mu)
    if tail >= -1:
        raise DivergentIntegralError(
            f"{integrand.__name__.strip('_')} diverges: integrand ~ x^{tail:.3g} at infinity"
        )

    def f(x):
        return integrand(x, g.value(x), g.d1(x), g.d2(x), mu, eps, b)

    res = integrate_halfline(f, tol=tol, tail_order=tail, x_max=g.x_max)
    return res.value, res.abs_error_estimate


def p_beta(g, params, beta: int, tol: float = DEFAULT_TOL) -> float:
    if beta not in (0, 1):
        raise ValueError(f"beta must be 0 or 1, got {beta!r}")
    return _integral(_p0 if beta == 0 else _p1, g, params, tol)[0]


def q_form(g, params, tol: float = DEFAULT_TOL) -> float:
    return _integral(_q, g, params, tol)[0]


def i_functional(g, params, tol: float = DEFAULT_TOL) -> float:
    """I[g] by direct quadrature of the squared Kummer-type residual."""
    return _integral(_i, g, params, tol)[0]


@dataclass(frozen=True)
class FunctionalReport:
    p0: float
    p1: float
    q: float
    i_residual: float
    p0_err: float
    p1_err: float
    q_err: float
    i_err: float
    r: float
    r_tilde: float

    def as_dict(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def identity_residual(g, params, tol: float = DEFAULT_TOL) -> float:
    """I[g], after checking it against Q + P_1 - c P_0."""
    return _identity(g, params, tol)[0]


def _identity(g, params, tol):
    p = as_generalized(params)
    i_val, i_err = _integral(_i, g, p, tol)
    p0, p0_err = _integral(_p0, g, p, tol)
    p1, p1_err = _integral(_p1, g, p, tol)
    q, q_err = _integral(_q, g, p, tol)
    rhs = q + p1 - p.c * p0
    # scale by the size of the terms being combined, not only |I|
    scale = 1 + abs(i_val) + abs(q) + abs(p1) + p.c * abs(p0)
    if abs(i_val - rhs) > 10 * tol * scale:
        raise IdentityCheckError(
            f"I[g] = {i_val!r} but Q + P1 - c P0 = {rhs!r} (diff {i_val - rhs:.3e})"
        )
    return i_val, i_err, (p0, p0_err), (p1, p1_err), (q, q_err)


def r_quotients(g, params, tol: float = DEFAULT_TOL) -> FunctionalReport:
    """All four integrals plus R and R~ for one profile."""
    i_val, i_err, (p0, p0_err), (p1, p1_err), (q, q_err) = _identity(g, params, tol)
    if p0 <= tol:
        raise DegenerateProfileError(f"P0[g] = {p0:.3e} <= tol; g is numerically constant")
    return FunctionalReport(
        p0=p0, p1=p1, q=q, i_residual=i_val,
        p0_err=p0_err, p1_err=p1_err, q_err=q_err, i_err=i_err,
        r=q * p1 / (p0 * p0), r_tilde=(q + p1) / p0,
    )


def balance_scaling(g, params, tol: float = DEFAULT_TOL):
    """(lam*, R~ of the balanced profile) with lam* = (P_1/Q)^(1/4).

    lam* is the scale of the field in R^N, u(x) -> u(lam x), which acts on
    the profile as g(x) -> g(lam^2 x).  Under that map
    R~ = (lam^2 Q + lam^-2 P_1) / P_0, minimised at lam* with value 2 sqrt(R).
    """
    g = as_profile(g)
    q = q_form(g, params, tol)
    p1 = p_beta(g, params, 1, tol)
    if q <= 0 or p1 <= 0:
        raise DegenerateProfileError(f"scaling undefined for Q={q:.3e}, P1={p1:.3e}")
    lam = (p1 / q) ** 0.25
    scaled = g.rescaled(lam * lam)
    r_tilde = (q_form(scaled, params, tol) + p_beta(scaled, params, 1, tol)) / p_beta(
        scaled, params, 0, tol
    )
    return lam, r_tilde


def dmu_norm(g, mu, tol: float = DEFAULT_TOL) -> float:
    """sqrt(4 Q + int g'^2 (x+1) x^mu + int g^2 x^(mu-1))."""
    mu = float(mu.mu) if hasattr(mu, "mu") else float(mu)
    # eps does not enter these integrals; any admissible value will do
    params = (mu, mu * mu / 8)
    q = _integral(_q, g, params, tol)[0]
    d1 = _integral(_norm_d1, g, params, tol)[0]
    g0 = _integral(_norm_g, g, params, tol)[0]
    return math.sqrt(4 * q + d1 + g0)


def random_poly_exp_profile(rng: np.random.Generator, max_degree: int = 6,
                            lam_range=(0.3, 3.0)) -> RadialProfile:
    """p(x) exp(-lam x) with deg p <= max_degree, standard-normal coefficients."""
    degree = int(rng.integers(0, max_degree + 1))
    coeffs = rng.standard_normal(degree + 1)
    lam = float(rng.uniform(*lam_range))
    return poly_exp_profile(coeffs, lam)


def random_params(rng: np.random.Generator, mu_range=(0.5, 6.0)):
    """(mu, eps) with 0 < eps < mu^2/4, eps kept away from both ends."""
    mu = float(rng.uniform(*mu_range))
    eps = float(rng.uniform(0.05, 0.95)) * mu * mu / 4
    return as_generalized((mu, eps))


__all__ = [
    "RadialProfile", "FunctionalReport", "poly_exp_profile", "extremal_radial_profile",
    "as_profile", "linear_combination", "p_beta", "q_form", "i_functional",
    "identity_residual", "r_quotients", "balance_scaling", "dmu_norm",
    "random_poly_exp_profile", "random_params", "DegenerateProfileError",
    "DivergentIntegralError", "IdentityCheckError",
]
