"""Explicit extremal vector fields and direct checks on them.

Toroidal (N = 3)
    u(x) = M x exp(-c |x|^2) with M antisymmetric, so x . u = 0 and
    div u = 0.  Its quotient is checked by tensor Gauss-Legendre quadrature.

Poloidal (any N >= 3)
    u = D(Y h) with Y = a . sigma, h(r) = g0(r^2) and the poloidal generator
    D = sigma Lap_sigma - r d'_r grad_sigma, d'_r = d_r + (N-1)/r.  In
    Cartesian form

        u = -(N-1) Y h sigma - (r h' + (N-1) h) (a - Y sigma),
        r h'(r) = 2 r^2 g0'(r^2).

    Its quotient goes through the exact one-dimensional reduction.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial.legendre import leggauss

from .functionals import r_quotients
from .params import DomainError, ProblemParams
from .quadrature import integrate_halfline
from .special import extremal_profile

RICHARDSON_TOL = 1e-4
DEFAULT_GRID_N = 48
DEFAULT_BOX_L = 7.0


@dataclass(frozen=True)
class ToroidalExtremal:
    """u_k(x) = (row_k of M) . x  exp(-c_decay |x|^2), N = 3.

    Only the strict upper triangle (M12, M13, M23) is stored, so M is
    antisymmetric by construction.
    """

    upper: tuple = (1.0, 0.0, 0.0)
    c_decay: float = 0.5
    N: int = field(default=3, init=False)

    def __post_init__(self):
        if len(self.upper) != 3:
            raise ValueError("upper must hold (M12, M13, M23)")
        if not self.c_decay > 0:
            raise DomainError(f"c_decay must be positive, got {self.c_decay}")
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))

    @property
    def M(self) -> np.ndarray:
        m12, m13, m23 = self.upper
        return np.array([[0.0, m12, m13], [-m12, 0.0, m23], [-m13, -m23, 0.0]])

    @classmethod
    def from_matrix(cls, M, c_decay=0.5) -> "ToroidalExtremal":
        M = np.asarray(M, dtype=float)
        if np.max(np.abs(M + M.T)) > 1e-14 * max(1.0, np.max(np.abs(M))):
            raise DomainError("matrix is not antisymmetric")
        return cls((M[0, 1], M[0, 2], M[1, 2]), c_decay)


def eval_toroidal(fld: ToroidalExtremal, x) -> np.ndarray:
    """u at points x of shape (..., 3)."""
    x = np.asarray(x, dtype=float)
    e = np.exp(-fld.c_decay * np.sum(x * x, axis=-1))
    return (x @ fld.M.T) * e[..., None]


def grad_toroidal(fld: ToroidalExtremal, x) -> np.ndarray:
    """Jacobian d u_k / d x_j, shape (..., 3, 3)."""
    x = np.asarray(x, dtype=float)
    e = np.exp(-fld.c_decay * np.sum(x * x, axis=-1))
    Mx = x @ fld.M.T
    J = fld.M - 2 * fld.c_decay * Mx[..., :, None] * x[..., None, :]
    return J * e[..., None, None]


@dataclass(frozen=True)
class PoloidalExtremal:
    """D(Y g0(|x|^2)) with Y = axis . sigma and g0 for (N/2 + 1, (N-1)/2).

    ``angular="constant"`` stands for a degree-zero potential; it has
    nonzero spherical mean, lies outside the poloidal class, and every
    operation on it is rejected.
    """

    N: int = 3
    axis: tuple = (0.0, 0.0, 1.0)
    lam: float = 1.0
    angular: str = "linear"

    def __post_init__(self):
        params = ProblemParams(self.N, 1)
        axis = tuple(float(v) for v in self.axis)
        if len(axis) != params.N:
            raise ValueError(f"axis must have {params.N} components")
        if not any(axis):
            raise DomainError("axis must be nonzero")
        if self.angular not in ("linear", "constant"):
            raise ValueError(f"unknown angular factor {self.angular!r}")
        object.__setattr__(self, "axis", axis)

    @property
    def params(self) -> ProblemParams:
        return ProblemParams(self.N, 1)

    @property
    def profile(self):
        return extremal_profile(self.params, self.lam)

    def require_zero_mean(self):
        if self.angular != "linear":
            raise DomainError("poloidal potential must have zero spherical mean")

    def radial(self, r):
        """(h, r h') at radius r."""
        g0 = self.profile
        r2 = np.asarray(r, dtype=float) ** 2
        return g0.value(r2), 2 * r2 * g0.d1(r2)


def eval_poloidal(fld: PoloidalExtremal, x) -> np.ndarray:
    """u at points x of shape (..., N), x != 0."""
    fld.require_zero_mean()
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise DomainError("eval_poloidal is defined for x != 0 only")
    a = np.asarray(fld.axis)
    sigma = x / r[..., None]
    Y = sigma @ a
    h, rh1 = fld.radial(r)
    n1 = fld.N - 1
    radial = (-n1 * Y * h)[..., None] * sigma
    tangential = (rh1 + n1 * h)[..., None] * (a - Y[..., None] * sigma)
    return radial - tangential


def poloidal_potential(fld: PoloidalExtremal):
    """f(x) = (axis . sigma) g0(|x|^2) as a function of points (..., N)."""
    fld.require_zero_mean()
    a = np.asarray(fld.axis)
    g0 = fld.profile

    def f(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        return (x @ a) / r * g0.value(r * r)

    return f


def apply_poloidal_operator_fd(f, x, N: int, h: float = 1e-3) -> np.ndarray:
    """D f at one point x by finite differences of the scalar f.

    Uses Lap_sigma f = r^2 (Lap f - f_rr) - (N-1) r f_r and
    grad_sigma f = r (grad f - sigma f_r); the operator d'_r on the vector
    grad_sigma f is a radial central difference plus (N-1)/r.
    """
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x)
    sigma = x / r
    eye = np.eye(N)

    def grad(p):
        return np.array([(f(p + h * e) - f(p - h * e)) / (2 * h) for e in eye])

    def grad_sigma(p):
        rp = np.linalg.norm(p)
        sp = p / rp
        gr = grad(p)
        return rp * (gr - sp * (gr @ sp))

    f0 = f(x)
    lap = sum((f(x + h * e) - 2 * f0 + f(x - h * e)) / h**2 for e in eye)
    f_r = (f(x + h * sigma) - f(x - h * sigma)) / (2 * h)
    f_rr = (f(x + h * sigma) - 2 * f0 + f(x - h * sigma)) / h**2
    lap_sigma = r * r * (lap - f_rr) - (N - 1) * r * f_r
    gs_plus, gs_minus = grad_sigma(x + h * sigma), grad_sigma(x - h * sigma)
    d_r = (gs_plus - gs_minus) / (2 * h)
    dprime = d_r + (N - 1) / r * grad_sigma(x)
    return sigma * lap_sigma - r * dprime


def divergence_fd(evaluator, x, h: float = 1e-4):
    """Central-difference divergence and a cancellation scale.

    Returns (div, scale) where scale = sum_k |d u_k / d x_k| estimated with
    the same differences; |div| / scale is the scaled divergence.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    N = x.shape[-1]
    div = np.zeros(x.shape[0])
    scale = np.zeros(x.shape[0])
    for k in range(N):
        e = np.zeros(N)
        e[k] = h
        dk = (evaluator(x + e)[..., k] - evaluator(x - e)[..., k]) / (2 * h)
        div += dk
        scale += np.abs(dk)
    return div, scale


def scaled_divergence(evaluator, x, h: float = 1e-4) -> np.ndarray:
    div, scale = divergence_fd(evaluator, x, h)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    # fall back to |u|/|x| where all diagonal derivatives vanish together
    u = np.linalg.norm(evaluator(x), axis=-1) / np.linalg.norm(x, axis=-1)
    return np.abs(div) / np.maximum(scale, u + 1e-300)


def annulus_points(rng: np.random.Generator, n: int, N: int = 3, r_min=0.2, r_max=3.0):
    """n points with radius uniform in [r_min, r_max] and uniform direction."""
    d = rng.standard_normal((n, N))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = rng.uniform(r_min, r_max, n)
    return d * r[:, None]


@dataclass(frozen=True)
class QuotientReport:
    integral_grad: float
    integral_weighted: float
    integral_l2: float
    quotient: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("integral_grad", "integral_weighted", "integral_l2"):
            if not getattr(self, name) > 0:
                raise ArithmeticError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def flagged(self) -> bool:
        return bool(self.meta.get("flagged", False))

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _tensor_integrals(fld: ToroidalExtremal, n: int, L: float):
    t, w = leggauss(n)
    t, w = L * t, L * w
    X = np.stack(np.meshgrid(t, t, t, indexing="ij"), axis=-1).reshape(-1, 3)
    W = (w[:, None, None] * w[None, :, None] * w[None, None, :]).ravel()
    u = eval_toroidal(fld, X)
    J = grad_toroidal(fld, X)
    u2 = np.sum(u * u, axis=-1)
    grad = float(W @ np.sum(J * J, axis=(-1, -2)))
    weighted = float(W @ (u2 * np.sum(X * X, axis=-1)))
    l2 = float(W @ u2)
    return grad, weighted, l2


def quotient_toroidal_3d(fld: ToroidalExtremal, grid_n: int = DEFAULT_GRID_N,
                         box_L: float = DEFAULT_BOX_L) -> QuotientReport:
    """Three integrals of the toroidal field over [-L, L]^3.

    The grid is repeated with grid_n + 8 nodes per axis; a quotient change
    above RICHARDSON_TOL sets ``flagged`` in the report.
    """
    if not fld.c_decay * box_L**2 >= 20:
        raise DomainError(f"box too small: c_decay L^2 = {fld.c_decay * box_L**2:.3g} < 20")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    grad, weighted, l2 = _tensor_integrals(fld, grid_n, box_L)
    q = grad * weighted / (l2 * l2)
    g2, w2, l22 = _tensor_integrals(fld, grid_n + 8, box_L)
    q_fine = g2 * w2 / (l22 * l22)
    diff = abs(q_fine - q)
    meta = {"grid_n": grid_n, "box_L": box_L, "c_decay": fld.c_decay,
            "richardson_quotient": q_fine, "richardson_diff": diff,
            "flagged": bool(diff > RICHARDSON_TOL)}
    return QuotientReport(grad, weighted, l2, q, meta)


def quotient_poloidal_1d(params: ProblemParams, lam: float = 1.0, tol: float = 1e-10) -> QuotientReport:
    """Quotient of the poloidal extremal through the one-dimensional reduction.

    Up to one common positive factor, the gradient, weighted and plain L2
    integrals of the field are 4 Q, P_1 and P_0 of its profile g0.
    """
    params = params if isinstance(params, ProblemParams) else ProblemParams(*params)
    if params.nu != 1:
        raise DomainError("the poloidal extremal uses degree nu = 1")
    rep = r_quotients(extremal_profile(params, lam), params, tol)
    q = 4 * rep.q * rep.p1 / rep.p0**2
    meta = {"n": params.N, "lambda": lam, "tol": tol, "normalization": "reduced",
            "p0_err": rep.p0_err, "p1_err": rep.p1_err, "q_err": rep.q_err,
            "i_residual": rep.i_residual}
    return QuotientReport(4 * rep.q, rep.p1, rep.p0, q, meta)


def sphere_grid(n_theta: int = 24, n_phi: int = 48):
    """Unit vectors and weights: Gauss-Legendre in cos(theta), trapezoid in phi."""
    z, wz = leggauss(n_theta)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    rho = np.sqrt(1 - z * z)
    pts = np.stack([
        (rho[:, None] * np.cos(phi)[None, :]).ravel(),
        (rho[:, None] * np.sin(phi)[None, :]).ravel(),
        np.repeat(z, n_phi),
    ], axis=-1)
    w = np.repeat(wz, n_phi) * (2 * math.pi / n_phi)
    return pts, w


def sphere_reduction_check(fld: PoloidalExtremal, r: float, n_theta: int = 24, n_phi: int = 48):
    """(lhs, rhs) of (1/alpha) int_S |u(r s)|^2 ds = (alpha h^2 + (r h' + 2h)^2) int_S Y^2 ds.

    N = 3, alpha = 2.  The left side is quadrature of eval_poloidal; the
    right side uses int_S (a . s)^2 ds = 4 pi |a|^2 / 3.
    """
    fld.require_zero_mean()
    if fld.N != 3:
        raise DomainError("sphere_reduction_check is implemented for N = 3")
    if not r > 0:
        raise DomainError("r must be positive")
    alpha = fld.params.alpha_nu
    s, w = sphere_grid(n_theta, n_phi)
    u = eval_poloidal(fld, r * s)
    lhs = float(w @ np.sum(u * u, axis=-1)) / alpha
    h, rh1 = fld.radial(r)
    a = np.asarray(fld.axis)
    rhs = float((alpha * h * h + (rh1 + 2 * h) ** 2) * 4 * math.pi / 3 * (a @ a))
    return lhs, rhs


def poloidal_radial_integral(fld: PoloidalExtremal, beta: int = 0, tol: float = 1e-12) -> float:
    """int_{R^N} |u|^2 |x|^(2 beta) dx through the spherical identity.

    Uses int_S |u(r s)|^2 ds = alpha (alpha h^2 + (r h' + (N-1) h)^2) int_S Y^2
    and int_S (a . s)^2 ds = |a|^2 |S^(N-1)| / N.
    """
    fld.require_zero_mean()
    N = fld.N
    alpha = fld.params.alpha_nu
    a = np.asarray(fld.axis)
    sphere = 2 * math.pi ** (N / 2) / math.gamma(N / 2)
    y2 = (a @ a) * sphere / N
    q = fld.profile.spec.b - fld.profile.spec.mu

    def f(r):
        h, rh1 = fld.radial(r)
        return alpha * (alpha * h * h + (rh1 + (N - 1) * h) ** 2) * y2 * r ** (N - 1 + 2 * beta)

    r_max = math.sqrt(fld.profile.x_max)
    # h ~ r^(2q), so the integrand decays like r^(4q + N - 1 + 2 beta)
    return integrate_halfline(f, tol=tol, tail_order=4 * q + N - 1 + 2 * beta, x_max=r_max).value


@dataclass(frozen=True)
class GaussianQuotient:
    integral_grad: float
    integral_weighted: float
    integral_l2: float
    quotient: float


def scalar_gaussian_quotient(N: int, B: float, weights) -> GaussianQuotient:
    """Closed-form integrals of f = sum_k w_k x_k exp(-B |x|^2) on R^N.

    With S = sum w_k^2 and G = (pi / 2B)^(N/2):
        int |grad f|^2   = (N+2)/4 G S
        int f^2 |x|^2    = (N+2)/(4 (2B)^2) G S
        int f^2          = 1/(4B) G S.
    The quotient is formed from the rational coefficients, where G S
    cancels, so it comes out as (N+2)^2/4 exactly.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (N,):
        raise ValueError(f"need {N} direction weights, got shape {w.shape}")
    if not np.any(w):
        raise DomainError("weights must not all vanish")
    if not B > 0:
        raise DomainError(f"B must be positive, got {B}")
    GS = (math.pi / (2 * B)) ** (N / 2) * float(w @ w)
    Bq = Fraction(B)
    c_grad = Fraction(N + 2, 4)
    c_weighted = Fraction(N + 2, 4) / (2 * Bq) ** 2
    c_l2 = 1 / (4 * Bq)
    quotient = float(c_grad * c_weighted / (c_l2 * c_l2))
    return GaussianQuotient(float(c_grad) * GS, float(c_weighted) * GS, float(c_l2) * GS, quotient)


def gaussian_integrals_by_quadrature(N: int, B: float, weights, n: int = 40, box_L: float | None = None):
    """The same three integrals by tensor Gauss-Legendre on [-L, L]^N.

    f and grad f are evaluated from their explicit formulas
    grad f = (w - 2B x (w . x)) exp(-B |x|^2).
    """
    w = np.asarray(weights, dtype=float)
    if box_L is None:
        # exp(-2B L^2) = e^-40 leaves the truncation far below 1e-12
        box_L = math.sqrt(20 / B)
    t, wt = leggauss(n)
    t, wt = box_L * t, box_L * wt
    X = np.stack(np.meshgrid(*([t] * N), indexing="ij"), axis=-1).reshape(-1, N)
    W = wt
    for _ in range(N - 1):
        W = np.multiply.outer(W, wt)
    W = W.ravel()
    r2 = np.sum(X * X, axis=-1)
    e = np.exp(-B * r2)
    wx = X @ w
    f = wx * e
    G = (w[None, :] - 2 * B * X * wx[:, None]) * e[:, None]
    return (float(W @ np.sum(G * G, axis=-1)), float(W @ (f * f * r2)), float(W @ (f * f)))


def gradient_control_field(x):
    """x exp(-|x|^2): a curl-free field with div = (N - 2|x|^2) exp(-|x|^2)."""
    x = np.asarray(x, dtype=float)
    return x * np.exp(-np.sum(x * x, axis=-1))[..., None]


__all__ = [
    "ToroidalExtremal", "PoloidalExtremal", "QuotientReport", "GaussianQuotient",
    "eval_toroidal", "grad_toroidal", "eval_poloidal", "poloidal_potential",
    "apply_poloidal_operator_fd", "divergence_fd", "scaled_divergence", "annulus_points",
    "quotient_toroidal_3d", "quotient_poloidal_1d", "sphere_grid", "sphere_reduction_check",
    "poloidal_radial_integral", "scalar_gaussian_quotient", "gaussian_integrals_by_quadrature",
    "gradient_control_field",
]
