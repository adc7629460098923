"""Kummer's confluent hypergeometric function and the extremal radial profile.

Only the power series is used.  For b, mu > 0 and x >= 0 every term is
positive, so summation is free of cancellation; the price is a hard upper
limit on x (about 650) where the running terms would overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import DomainError, as_generalized

REL_TOL = 1e-15
MAX_TERMS = 10_000
OVERFLOW_GUARD = 1e290
# largest lambda*x the profile accepts; e^650 ~ 1e282 stays under the guard
PROFILE_ARG_MAX = 650.0


class KummerRangeError(OverflowError):
    """Series terms exceeded the overflow guard."""


class KummerConvergenceError(ArithmeticError):
    """Series did not reach the relative tolerance within MAX_TERMS terms."""


def pochhammer(q: float, k: int) -> float:
    """Rising factorial (q)_k = q (q+1) ... (q+k-1), with (q)_0 = 1."""
    if k < 0 or int(k) != k:
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    return float(math.prod(q + j for j in range(int(k))))


def _check_mu(mu):
    if mu <= 0 and float(mu).is_integer():
        raise DomainError(f"1F1 undefined for non-positive integer mu={mu}")


def kummer_1f1(b, mu, x, rel_tol=REL_TOL, max_terms=MAX_TERMS):
    """Power series sum_k (b)_k / (mu)_k x^k / k!  for x >= 0.

    Accepts scalar or array ``x``; returns the same shape.  Summation stops
    once every term is below ``rel_tol`` times its partial sum and the term
    ratio has dropped below one.
    """
    _check_mu(mu)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or not np.all(np.isfinite(xa)):
        raise DomainError("kummer_1f1 needs finite x >= 0")
    flat = xa.ravel()
    out = np.ones_like(flat)
    # converged entries are dropped so small arguments stop early
    idx = np.arange(flat.size)
    xs = flat.copy()
    term = np.ones_like(xs)
    total = np.ones_like(xs)
    for k in range(max_terms):
        ratio = (b + k) * xs / ((mu + k) * (k + 1))
        term = term * ratio
        total = total + term
        if k % 8 == 7 or k < 8:
            if np.max(np.abs(term), initial=0.0) > OVERFLOW_GUARD:
                raise KummerRangeError(
                    f"1F1({b}, {mu}, x) terms exceed {OVERFLOW_GUARD:.0e} at x={xa.max():g}"
                )
            done = (np.abs(term) <= rel_tol * np.abs(total)) & (np.abs(ratio) < 1)
            if np.any(done):
                out[idx[done]] = total[done]
                keep = ~done
                idx, xs, term, total = idx[keep], xs[keep], term[keep], total[keep]
            if idx.size == 0:
                break
    else:
        raise KummerConvergenceError(f"1F1({b}, {mu}, x) not converged in {max_terms} terms")
    out = out.reshape(xa.shape)
    return out if np.ndim(x) else float(out)


def kummer_partial_sums(b, mu, x, n_terms):
    """First ``n_terms`` partial sums of the series at scalar x."""
    _check_mu(mu)
    sums = np.empty(n_terms)
    term, total = 1.0, 1.0
    sums[0] = total
    for k in range(n_terms - 1):
        term *= (b + k) * x / ((mu + k) * (k + 1))
        total += term
        sums[k + 1] = total
    return sums


def kummer_1f1_derivative(b, mu, x, order=1):
    """d/dx or d^2/dx^2 of 1F1(b, mu, x) via (b/mu) 1F1(b+1, mu+1, x)."""
    if order == 1:
        return (b / mu) * kummer_1f1(b + 1, mu + 1, x)
    if order == 2:
        return (b * (b + 1)) / (mu * (mu + 1)) * kummer_1f1(b + 2, mu + 2, x)
    raise ValueError(f"order must be 1 or 2, got {order!r}")


@dataclass(frozen=True)
class KummerSpec:
    b: float
    mu: float
    lam: float = 1.0

    def __post_init__(self):
        if not (self.b > 0 and self.mu > 0 and self.lam > 0):
            raise DomainError(f"need b, mu, lambda > 0, got {self}")


@dataclass(frozen=True)
class ExtremalProfile:
    """g0(x) = exp(-lam x) 1F1(b, mu, lam x) and its first two derivatives.

    Derivatives use the Kummer transformation
    exp(-y) 1F1(b, m, y) = 1F1(m-b, m, -y), which gives

        g0'  = -lam (mu-b)/mu                 exp(-y) 1F1(b, mu+1, y)
        g0'' = lam^2 (mu-b)(mu+1-b)/(mu(mu+1)) exp(-y) 1F1(b, mu+2, y)

    with y = lam x.  All three are sums of positive terms, so no digits are
    lost to the cancellation that the product rule would suffer at large x.
    """

    spec: KummerSpec

    @property
    def x_max(self) -> float:
        return PROFILE_ARG_MAX / self.spec.lam

    def _scaled(self, m, x):
        y = self.spec.lam * np.asarray(x, dtype=float)
        return np.exp(-y) * kummer_1f1(self.spec.b, m, y)

    def value(self, x):
        return self._scaled(self.spec.mu, x)

    def d1(self, x):
        b, mu, lam = self.spec.b, self.spec.mu, self.spec.lam
        return -lam * (mu - b) / mu * self._scaled(mu + 1, x)

    def d2(self, x):
        b, mu, lam = self.spec.b, self.spec.mu, self.spec.lam
        return lam * lam * (mu - b) * (mu + 1 - b) / (mu * (mu + 1)) * self._scaled(mu + 2, x)

    def product_rule(self, x):
        """(g0, g0', g0'') by differentiating exp(-lam x) times the series directly."""
        b, mu, lam = self.spec.b, self.spec.mu, self.spec.lam
        y = lam * np.asarray(x, dtype=float)
        e = np.exp(-y)
        F = kummer_1f1(b, mu, y)
        F1 = kummer_1f1_derivative(b, mu, y, 1)
        F2 = kummer_1f1_derivative(b, mu, y, 2)
        return e * F, lam * e * (F1 - F), lam * lam * e * (F2 - 2 * F1 + F)

    def __call__(self, x):
        return self.value(x)


def extremal_profile(params, lam: float = 1.0) -> ExtremalProfile:
    """Minimiser exp(-lam x) 1F1(b, mu, lam x) for the given (mu, eps)."""
    p = as_generalized(params)
    return ExtremalProfile(KummerSpec(p.b, p.mu, float(lam)))


def tail_exponent(params) -> float:
    """Algebraic decay order b - mu of the extremal profile (always negative)."""
    p = as_generalized(params)
    return p.b - p.mu
