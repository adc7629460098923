"""Galerkin minimisation of R~[g] = (Q + P_1) / P_0.

On a K-dimensional trial space the minimum of R~ is the smallest root of
the pencil A v = lam B v, where A is the bilinear form of Q + P_1 and B that
of P_0.  Because the trial space sits inside the admissible class, the
computed lam_min can only overshoot the true infimum c: the result is a
one-sided certificate.

Two basis families are provided.

``laguerre``
    phi_k(x) = exp(-x) L_k^(mu)(2x).  Exponential decay means it can only
    approximate the algebraically decaying minimiser slowly (the gap to c
    shrinks like a power of K).

``mapped_jacobi`` (default)
    phi_k(x) = s^p P_k^(mu, 2p-mu)(2s-1) with s = 1/(1 + x/ell) and
    p = mu - b, the decay order of the minimiser.  Every phi_k has the
    right algebraic tail and the gap decays geometrically in K.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_jacobi

from .functionals import RadialProfile
from .params import as_generalized
from .quadrature import gauss_jacobi_rule, gauss_laguerre_rule

MAX_K = 64
MAX_SWEEPS = 100
OFF_TOL = 1e-13
DEFAULT_BASIS = "mapped_jacobi"
MAP_SCALE = 2.0
BASES = ("mapped_jacobi", "laguerre")


class AssemblyError(ArithmeticError):
    """Assembled matrices are not symmetric or B is not positive definite."""


class EigenSolverError(RuntimeError):
    """Cyclic Jacobi did not converge within MAX_SWEEPS sweeps."""


def _check_K(K):
    if int(K) != K or not (2 <= K <= MAX_K):
        raise ValueError(f"K must be an integer in [2, {MAX_K}], got {K!r}")
    return int(K)


def laguerre_values(k_max: int, alpha: float, t):
    """L_0..L_{k_max-1} of parameter alpha at t, stacked along axis 0."""
    t = np.asarray(t, dtype=float)
    out = np.empty((k_max,) + t.shape)
    out[0] = 1.0
    if k_max > 1:
        out[1] = 1 + alpha - t
    for k in range(1, k_max - 1):
        out[k + 1] = ((2 * k + 1 + alpha - t) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def _laguerre_triple(K, mu, x):
    """(phi, phi', phi'') rows for phi_k = exp(-x) L_k^(mu)(2x).

    Uses d/dt L_k^(a) = -L_{k-1}^(a+1), so the derivatives come from the
    same recurrence with shifted parameters.
    """
    x = np.asarray(x, dtype=float)
    t = 2 * x
    L0 = laguerre_values(K, mu, t)
    L1 = np.zeros_like(L0)
    L2 = np.zeros_like(L0)
    if K > 1:
        L1[1:] = -laguerre_values(K - 1, mu + 1, t)
    if K > 2:
        L2[2:] = laguerre_values(K - 2, mu + 2, t)
    e = np.exp(-x)
    # d/dx L(2x) = 2 L'(t)
    phi = e * L0
    d1 = e * (2 * L1 - L0)
    d2 = e * (4 * L2 - 4 * L1 + L0)
    return phi, d1, d2


def _jacobi_triple_s(K, a, b, s):
    """P_k^(a,b)(2s-1) and its first two s-derivatives, k < K."""
    y = 2 * np.asarray(s, dtype=float) - 1
    k = np.arange(K).reshape((K,) + (1,) * y.ndim)
    P = eval_jacobi(k, a, b, y)
    km1 = np.maximum(k - 1, 0)
    km2 = np.maximum(k - 2, 0)
    # d/dy P_k^(a,b) = (k+a+b+1)/2 P_{k-1}^(a+1,b+1); d/ds = 2 d/dy
    dP = np.where(k > 0, (k + a + b + 1) * eval_jacobi(km1, a + 1, b + 1, y), 0.0)
    d2P = np.where(k > 1, (k + a + b + 1) * (k + a + b + 2) * eval_jacobi(km2, a + 2, b + 2, y), 0.0)
    return P, dP, d2P


def _jacobi_forms(K, p, a, b, s):
    """P, Q1 = pP + s P_s, Q2 = p(p+1)P + 2(p+1)s P_s + s^2 P_ss."""
    P, dP, d2P = _jacobi_triple_s(K, a, b, s)
    Q1 = p * P + s * dP
    Q2 = p * (p + 1) * P + 2 * (p + 1) * s * dP + s * s * d2P
    return P, Q1, Q2


@dataclass(frozen=True)
class BasisSpec:
    """Which family, its size and the constants that define it."""

    family: str
    K: int
    mu: float
    p: float = 0.0
    ell: float = MAP_SCALE

    @property
    def jacobi_ab(self):
        return self.mu, 2 * self.p - self.mu

    def triple(self, x):
        """(phi, phi', phi'') evaluated at x, each of shape (K,) + x.shape."""
        if self.family == "laguerre":
            return _laguerre_triple(self.K, self.mu, x)
        x = np.asarray(x, dtype=float)
        ell, p = self.ell, self.p
        s = 1 / (1 + x / ell)
        P, Q1, Q2 = _jacobi_forms(self.K, p, *self.jacobi_ab, s)
        return s**p * P, -(s ** (p + 1) / ell) * Q1, (s ** (p + 2) / ell**2) * Q2

    @property
    def decay(self):
        return None if self.family == "laguerre" else -self.p


def basis_spec(K: int, params, family: str = DEFAULT_BASIS, ell: float = MAP_SCALE) -> BasisSpec:
    K = _check_K(K)
    p = as_generalized(params)
    if family == "laguerre":
        return BasisSpec("laguerre", K, p.mu)
    if family == "mapped_jacobi":
        return BasisSpec("mapped_jacobi", K, p.mu, p=p.mu - p.b, ell=float(ell))
    raise ValueError(f"unknown basis family {family!r}; choose from {BASES}")


def _member(spec: BasisSpec, k: int) -> RadialProfile:
    def pick(i):
        return lambda x: spec.triple(x)[i][k]

    return RadialProfile(pick(0), pick(1), pick(2), decay=spec.decay)


def expand(spec: BasisSpec, coeffs) -> RadialProfile:
    """sum_k coeffs[k] phi_k as one profile (one basis evaluation per call)."""
    v = np.asarray(coeffs, dtype=float)

    def pick(i):
        return lambda x: np.tensordot(v, spec.triple(x)[i], axes=1)

    return RadialProfile(pick(0), pick(1), pick(2), decay=spec.decay)


def build_basis(K: int, mu, family: str = "laguerre", eps: float | None = None) -> list:
    """The K trial functions as RadialProfiles with analytic derivatives.

    ``mu`` may be a number (Laguerre family) or anything accepted by
    ``as_generalized``; the mapped Jacobi family needs eps as well.
    """
    if family == "laguerre" and np.isscalar(mu):
        spec = BasisSpec("laguerre", _check_K(K), float(mu))
    else:
        params = (mu, eps) if np.isscalar(mu) else mu
        spec = basis_spec(K, params, family)
    return [_member(spec, k) for k in range(spec.K)]


@dataclass
class GalerkinSystem:
    K: int
    params: object
    A: np.ndarray
    B: np.ndarray
    basis: BasisSpec
    scale: np.ndarray = field(repr=False, default=None)
    lambda_min: float | None = None
    coeffs: np.ndarray | None = None
    sweeps: int = 0

    def profile(self) -> RadialProfile:
        """The eigenvector expanded back into a function of x."""
        if self.coeffs is None:
            raise ValueError("system has not been solved")
        return expand(self.basis, self.coeffs)

    def residual(self) -> float:
        """||A v - lam B v|| in the B^-1 norm, relative to lam ||v||_B."""
        v = self.coeffs
        r = self.A @ v - self.lambda_min * (self.B @ v)
        L = np.linalg.cholesky(self.B)
        z = np.linalg.solve(L, r)
        return float(np.linalg.norm(z) / (abs(self.lambda_min) * math.sqrt(v @ self.B @ v)))


def _gram_laguerre(spec: BasisSpec, eps: float):
    K, mu = spec.K, spec.mu
    rule = gauss_laguerre_rule(mu - 1, K + math.ceil(mu) + 4)
    x = rule.nodes / 2
    # with t = 2x, int F(x) e^{-2x} x^{mu-1} dx = 2^{-mu} int F(t/2) t^{mu-1} e^{-t} dt
    w = rule.weights / 2**mu
    L0 = laguerre_values(K, mu, 2 * x)
    L1 = np.zeros_like(L0)
    L2 = np.zeros_like(L0)
    L1[1:] = -laguerre_values(K - 1, mu + 1, 2 * x)
    if K > 2:
        L2[2:] = laguerre_values(K - 2, mu + 2, 2 * x)
    f0, f1, f2 = L0, 2 * L1 - L0, 4 * L2 - 4 * L1 + L0
    A = (f2 * (w * x * x)) @ f2.T + (f1 * (w * x * x)) @ f1.T - eps * (f0 * w) @ f0.T
    B = (f1 * (w * x)) @ f1.T
    return A, B


def _gram_jacobi(spec: BasisSpec, eps: float):
    K, mu, p, ell = spec.K, spec.mu, spec.p, spec.ell
    a, b = spec.jacobi_ab
    # x = ell (1-s)/s turns every form into int (poly in s) (1-s)^(mu-1) s^(2p-mu-1) ds
    rule = gauss_jacobi_rule(mu - 1, 2 * p - mu - 1, K + 8)
    s, w = rule.nodes, rule.weights
    P, Q1, Q2 = _jacobi_forms(K, p, a, b, s)
    one = 1 - s
    A = (Q2 * (w * one**2 * s**2)) @ Q2.T / ell**2 + (Q1 * (w * one**2)) @ Q1.T - eps * (P * w) @ P.T
    B = (Q1 * (w * one * s)) @ Q1.T / ell
    return A * ell**mu, B * ell**mu


def assemble(K: int, params, family: str = DEFAULT_BASIS) -> GalerkinSystem:
    """Matrices of Q + P_1 and P_0 on the first K basis functions."""
    p = as_generalized(params)
    spec = basis_spec(K, p, family)
    if spec.family == "laguerre":
        A, B = _gram_laguerre(spec, p.eps)
    else:
        A, B = _gram_jacobi(spec, p.eps)
    for name, M in (("A", A), ("B", B)):
        asym = np.max(np.abs(M - M.T))
        if asym > 1e-12 * np.max(np.abs(M)):
            raise AssemblyError(f"{name} not symmetric: max |M - M^T| = {asym:.3e}")
    A, B = (A + A.T) / 2, (B + B.T) / 2
    try:
        np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        raise AssemblyError("B is not positive definite") from None
    return GalerkinSystem(K=spec.K, params=p, A=A, B=B, basis=spec)


def _round_robin(m):
    """Rounds of disjoint index pairs covering all pairs of range(m), m even."""
    idx = list(range(m))
    rounds = []
    for _ in range(m - 1):
        rounds.append((np.array(idx[: m // 2]), np.array(idx[m // 2:][::-1])))
        idx = [idx[0]] + [idx[-1]] + idx[1:-1]
    return rounds


def jacobi_eigh(C: np.ndarray, off_tol: float = OFF_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi.

    Pairs are visited in round-robin order; each round rotates K/2 disjoint
    pairs at once.  Returns (eigenvalues ascending, vectors, sweeps).
    """
    A = np.array(C, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    m = n + (n % 2)
    rounds = []
    for P, Q in _round_robin(m):
        keep = (P < n) & (Q < n)
        P, Q = P[keep], Q[keep]
        lo, hi = np.minimum(P, Q), np.maximum(P, Q)
        rounds.append((lo, hi))
    norm = np.linalg.norm(A)
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= off_tol * norm:
            w = np.diag(A)
            order = np.argsort(w)
            return w[order], V[:, order], sweep
        if sweep == max_sweeps:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            active = apq != 0
            if not np.any(active):
                continue
            app, aqq = A[P, P], A[Q, Q]
            with np.errstate(divide="ignore", invalid="ignore"):
                tau = np.where(active, (aqq - app) / (2 * apq), 0.0)
            t = np.where(active, np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
            c = 1 / np.hypot(1.0, t)
            s = t * c
            Ap, Aq = A[P].copy(), A[Q].copy()
            A[P] = c[:, None] * Ap - s[:, None] * Aq
            A[Q] = s[:, None] * Ap + c[:, None] * Aq
            Ap, Aq = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = Ap * c - Aq * s
            A[:, Q] = Ap * s + Aq * c
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            Vp, Vq = V[:, P].copy(), V[:, Q].copy()
            V[:, P] = Vp * c - Vq * s
            V[:, Q] = Vp * s + Vq * c
    raise EigenSolverError(f"Jacobi sweeps did not converge in {max_sweeps} sweeps")


def min_eigenpair(system: GalerkinSystem):
    """Smallest root of A v = lam B v and its B-normalised eigenvector.

    The pencil is first rescaled so that diag(B) = 1, then reduced with the
    Cholesky factor of B and handed to the Jacobi solver.
    """
    d = 1 / np.sqrt(np.diag(system.B))
    As = system.A * np.outer(d, d)
    Bs = system.B * np.outer(d, d)
    L = np.linalg.cholesky(Bs)
    Linv = np.linalg.solve(L, np.eye(len(L)))
    C = Linv @ As @ Linv.T
    C = (C + C.T) / 2
    vals, vecs, sweeps = jacobi_eigh(C)
    y = vecs[:, 0]
    v = d * np.linalg.solve(L.T, y)
    v = v / math.sqrt(v @ system.B @ v)
    # fix the sign so that the expanded profile is positive at the origin
    g_at_0 = system.basis.triple(np.array([0.0]))[0][:, 0] @ v
    if g_at_0 < 0:
        v = -v
    system.lambda_min = float(vals[0])
    system.coeffs = v
    system.scale = d
    system.sweeps = sweeps
    return system.lambda_min, v


def solve(K: int, params, family: str = DEFAULT_BASIS) -> GalerkinSystem:
    system = assemble(K, params, family)
    min_eigenpair(system)
    return system


@dataclass
class ConvergenceTable:
    c: float
    rows: list = field(default_factory=list)
    converged: bool = False
    target_tol: float = 0.0
    basis: str = DEFAULT_BASIS
    raw: list = field(default_factory=list)

    COLUMNS = ("K", "lambda_min", "lambda_min_sq", "gap")

    @property
    def final(self) -> dict:
        return self.rows[-1]

    @property
    def ks(self):
        return [r["K"] for r in self.rows]

    @property
    def lambdas(self):
        return np.array([r["lambda_min"] for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: repr(r[k]) if isinstance(r[k], float) else r[k] for k in self.COLUMNS})
        return buf.getvalue()


def default_k_schedule(K_max: int):
    ks = list(range(2, K_max + 1, 2))
    if ks[-1] != K_max:
        ks.append(K_max)
    return ks


def converge_constant(params, K_max: int = 30, target_tol: float = 1e-6,
                      family: str = DEFAULT_BASIS, ks=None, stop_early: bool = True) -> ConvergenceTable:
    """lam_min(K) for K = 2, 4, ..., K_max until lam_min - c <= target_tol.

    The lam_min column is forced nonincreasing (a running minimum); nested
    trial spaces guarantee this in exact arithmetic, so the clamp only ever
    moves entries by roundoff.  Unclamped values are kept in ``raw``.  The
    squared column is the reported constant 4 inf R = c^2.
    """
    p = as_generalized(params)
    K_max = _check_K(K_max)
    ks = default_k_schedule(K_max) if ks is None else [int(k) for k in ks]
    table = ConvergenceTable(c=p.c, target_tol=target_tol, basis=family)
    best = math.inf
    for K in ks:
        lam = solve(K, p, family).lambda_min
        table.raw.append(lam)
        best = min(best, lam)
        table.rows.append({"K": K, "lambda_min": best, "lambda_min_sq": best * best,
                           "gap": best - p.c})
        if best - p.c <= target_tol:
            table.converged = True
            if stop_early:
                break
    return table


__all__ = [
    "AssemblyError", "EigenSolverError", "BasisSpec", "GalerkinSystem", "ConvergenceTable",
    "laguerre_values", "basis_spec", "build_basis", "expand", "assemble", "jacobi_eigh", "min_eigenpair",
    "solve", "converge_constant", "default_k_schedule", "BASES", "DEFAULT_BASIS",
]
