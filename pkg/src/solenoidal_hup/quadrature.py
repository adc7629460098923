"""Half-line quadrature.

Two schemes cover the two kinds of integrand that show up:

* Gauss rules built from the Jacobi matrix of an orthogonal-polynomial
  recurrence (generalized Laguerre on (0, inf), Jacobi on (0, 1)).  They are
  exact for polynomial content and drive the Galerkin assembly.
* An adaptive 15-point Gauss-Legendre integrator in t = log x, with an
  algebraic tail model, for profiles that only decay like a power of x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

MAX_RULE_SIZE = 256
MAX_DEPTH = 40
TAIL_TERMS = 6
_GL15 = leggauss(15)


class QuadratureError(RuntimeError):
    """Rule construction failed or adaptive refinement hit the depth limit.

    ``result`` carries the best available IntegralResult, if any.
    """

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


@dataclass(frozen=True)
class QuadratureRule:
    kind: str
    alpha: float
    nodes: np.ndarray
    weights: np.ndarray
    beta: float | None = None

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values) -> float:
        """Weighted sum; ``values`` are the integrand with the weight divided out."""
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class IntegralResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def _recurrence_values(x, a, b, mu0, n):
    """Orthonormal p_0..p_{n-1} summed in square, plus p_n and p_n' at x.

    Running values are rescaled per node so that n = 256 Laguerre recurrences
    at nodes near 1000 do not overflow; ``log_scale`` records the factor.
    """
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / math.sqrt(mu0))
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    sumsq = p * p
    log_scale = np.zeros_like(x)
    for k in range(n):
        p_next = ((x - a[k]) * p - b[k] * p_prev) / b[k + 1]
        dp_next = (p + (x - a[k]) * dp - b[k] * dp_prev) / b[k + 1]
        p_prev, p, dp_prev, dp = p, p_next, dp, dp_next
        if k < n - 1:
            sumsq = sumsq + p * p
        big = np.abs(p) > 1e100
        if np.any(big):
            f = np.where(big, np.abs(p), 1.0)
            p, p_prev, dp, dp_prev = p / f, p_prev / f, dp / f, dp_prev / f
            sumsq = sumsq / (f * f)
            log_scale = log_scale + np.log(f)
    return sumsq, log_scale, p, dp


def _golub_welsch(a, b, log_mu0, n):
    """Nodes and weights from recurrence coefficients.

    ``a[k]`` (k < n) is the diagonal, ``b[k]`` (1 <= k <= n) the off-diagonal
    of the Jacobi matrix; ``b[0]`` is unused.  Eigenvalues of the n x n
    matrix give the nodes; two Newton steps on p_n polish them and the
    Christoffel sum 1/sum p_k^2 gives weights with full relative accuracy.
    """
    nodes = eigh_tridiagonal(a[:n], b[1:n], eigvals_only=True)
    if not np.all(np.isfinite(nodes)):
        raise QuadratureError("tridiagonal eigensolver returned non-finite nodes")
    # run the recurrence with p_0 = 1; log_mu0 is restored in the weights
    for _ in range(2):
        _, _, pn, dpn = _recurrence_values(nodes, a, b, 1.0, n)
        step = np.where(dpn != 0, pn / dpn, 0.0)
        nodes = nodes - step
    sumsq, log_scale, _, _ = _recurrence_values(nodes, a, b, 1.0, n)
    # with p_0 = 1 the Christoffel numbers are mu0 / sum p_k^2
    weights = np.exp(log_mu0 - 2 * log_scale) / sumsq
    order = np.argsort(nodes)
    return nodes[order], weights[order]


def gauss_laguerre_rule(alpha: float, n: int) -> QuadratureRule:
    """n-point rule for int_0^inf f(x) x^alpha e^{-x} dx."""
    if not alpha > -1:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    if not (1 <= n <= MAX_RULE_SIZE):
        raise ValueError(f"need 1 <= n <= {MAX_RULE_SIZE}, got {n}")
    k = np.arange(n + 1, dtype=float)
    a = 2 * k + alpha + 1
    b = np.sqrt(k * (k + alpha))
    nodes, weights = _golub_welsch(a, b, float(gammaln(alpha + 1)), n)
    return QuadratureRule("gauss_laguerre_generalized", float(alpha), nodes, weights)


def gauss_jacobi_rule(alpha: float, beta: float, n: int) -> QuadratureRule:
    """n-point rule for int_0^1 f(s) (1-s)^alpha s^beta ds."""
    if not (alpha > -1 and beta > -1):
        raise ValueError(f"alpha, beta must exceed -1, got {alpha}, {beta}")
    if not (1 <= n <= MAX_RULE_SIZE):
        raise ValueError(f"need 1 <= n <= {MAX_RULE_SIZE}, got {n}")
    ab = alpha + beta
    k = np.arange(n + 1, dtype=float)
    s = 2 * k + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (beta**2 - alpha**2) / (s * (s + 2))
        b = np.sqrt(4 * k * (k + alpha) * (k + beta) * (k + ab) / (s**2 * (s + 1) * (s - 1)))
    a[0] = (beta - alpha) / (ab + 2)
    b[0] = 0.0
    if n >= 1:
        # k = 1 closed form avoids 0/0 when alpha + beta = -1
        b[1] = math.sqrt(4 * (1 + alpha) * (1 + beta) / ((ab + 2) ** 2 * (ab + 3)))
    log_mu0 = (ab + 1) * math.log(2) + gammaln(alpha + 1) + gammaln(beta + 1) - gammaln(ab + 2)
    y, w = _golub_welsch(a, b, float(log_mu0), n)
    s01 = (1 + y) / 2
    w01 = w / 2 ** (ab + 1)
    return QuadratureRule("gauss_jacobi", float(alpha), s01, w01, beta=float(beta))


def _gl15(lo, hi, f):
    """15-point Gauss-Legendre on each panel [lo_i, hi_i], one vectorised call."""
    x, w = _GL15
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("integrand returned non-finite values")
    return half * (vals @ w)


def integrate_interval(f: Callable, lo: float, hi: float, tol: float,
                       n_initial: int = 8) -> IntegralResult:
    """Adaptive panel Gauss-Legendre on a bounded interval.

    A panel is accepted when its 15-point estimate and the sum over its two
    halves agree within the panel's share of ``tol``.  All panels of one
    refinement level are evaluated in a single call to ``f``.
    """
    edges = np.linspace(lo, hi, n_initial + 1)
    a, b = edges[:-1], edges[1:]
    whole = _gl15(a, b, f)
    evals = 15 * len(a)
    total, err = 0.0, 0.0
    span = hi - lo
    for depth in range(MAX_DEPTH + 1):
        m = 0.5 * (a + b)
        left = _gl15(a, m, f)
        right = _gl15(m, b, f)
        evals += 30 * len(a)
        halves = left + right
        diff = np.abs(halves - whole)
        ok = diff <= tol * (b - a) / span
        total += float(np.sum(halves[ok]))
        err += float(np.sum(diff[ok]))
        if np.all(ok):
            return IntegralResult(total, err, evals)
        if depth == MAX_DEPTH:
            best = total + float(np.sum(halves[~ok]))
            raise QuadratureError(
                f"adaptive quadrature not converged at depth {MAX_DEPTH}",
                IntegralResult(best, err + float(np.sum(diff[~ok])), evals),
            )
        bad = ~ok
        a = np.concatenate([a[bad], m[bad]])
        b = np.concatenate([m[bad], b[bad]])
        whole = np.concatenate([left[bad], right[bad]])
    raise AssertionError("unreachable")


def integrate_halfline(f: Callable, tol: float = 1e-10, tail_order: float = -2.0,
                       x_max: float = np.inf) -> IntegralResult:
    """int_0^inf f(x) dx for f with |f(x)| <= C x^tail_order at large x.

    The bulk is integrated in t = log x.  Beyond the cut X the integrand is
    modelled by an asymptotic series sum_j c_j x^(q-j), fitted on [X/2, X]
    and integrated in closed form.  X is doubled until that tail falls below
    tol/10 or until X would pass ``x_max`` (the domain where f can be
    evaluated).  The gap between fits with one term more and one term less
    goes into the error estimate.
    """
    q = float(tail_order)
    if not q < -1:
        raise ValueError(f"tail_order must be < -1 for convergence, got {q}")
    if not tol > 0:
        raise ValueError("tol must be positive")

    def tail_fit(X, m=TAIL_TERMS):
        # f ~ sum_j c_j x^(q-j) on [X/2, X]; fits with m and m-1 terms bound the error
        xs = X / 2 ** (np.arange(m) / (m - 1))
        fx = np.asarray(f(xs), dtype=float)
        out = []
        for k in (m, m - 1):
            V = (xs[:k, None] / X) ** (q - np.arange(k))[None, :]
            coef = np.linalg.solve(V, fx[:k])
            j = np.arange(k)
            out.append(float(np.sum(coef * X / np.abs(q - j + 1))))
        return out[0], abs(out[0] - out[1]), m

    X = min(64.0, x_max)
    tail, tail_err, evals = tail_fit(X)
    while abs(tail) + tail_err > tol / 10 and 2 * X <= x_max:
        X *= 2
        tail, tail_err, n = tail_fit(X)
        evals += n

    x_lo = min(1e-2, X / 4)
    f_lo = abs(float(np.asarray(f(np.array([x_lo])))[0]))
    evals += 1
    while f_lo * x_lo > tol / 100 and x_lo > 1e-300:
        x_lo /= 16
        f_lo = abs(float(np.asarray(f(np.array([x_lo])))[0]))
        evals += 1
    head_err = f_lo * x_lo

    def g(t):
        x = np.exp(t)
        return np.asarray(f(x), dtype=float) * x

    budget = max(tol - tail_err - head_err, tol / 4)
    t_lo, t_hi = math.log(x_lo), math.log(X)
    n_initial = max(8, int(math.ceil(t_hi - t_lo)))
    try:
        bulk = integrate_interval(g, t_lo, t_hi, budget, n_initial=n_initial)
    except QuadratureError as exc:
        best = exc.result
        raise QuadratureError(
            str(exc),
            IntegralResult(best.value + tail, best.abs_error_estimate + tail_err + head_err,
                           best.evaluations + evals),
        ) from None
    return IntegralResult(bulk.value + tail, bulk.abs_error_estimate + tail_err + head_err,
                          bulk.evaluations + evals)
