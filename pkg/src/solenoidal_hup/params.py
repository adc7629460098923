"""Problem parameters and closed-form best constants.

Every HUP ratio here has the form

    int |grad u|^2 * int |u|^2 |x|^2  /  (int |u|^2)^2

and the constants below are its sharp lower bounds for different classes of
vector fields u on R^N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field


class DomainError(ValueError):
    """Raised when N, nu, mu or eps fall outside the admissible range."""


def _check_int(name: str, value, lo: int) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < lo:
        raise DomainError(f"{name} must be >= {lo}, got {value}")
    return value


@dataclass(frozen=True)
class GeneralizedParams:
    """The pair (mu, eps) of the one-dimensional problem, as continuous reals.

    Requires mu > 0 and 0 < eps < mu**2 / 4.
    """

    mu: float
    eps: float

    def __post_init__(self):
        mu, eps = float(self.mu), float(self.eps)
        if not (mu > 0 and math.isfinite(mu)):
            raise DomainError(f"mu must be positive, got {mu}")
        if not (0 < eps < mu * mu / 4):
            raise DomainError(f"need 0 < eps < mu^2/4 = {mu * mu / 4}, got eps={eps}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "eps", eps)

    @property
    def disc(self) -> float:
        """sqrt(mu^2 - 4 eps), strictly positive."""
        return math.sqrt(self.mu * self.mu - 4 * self.eps)

    @property
    def b(self) -> float:
        return (self.mu - self.disc) / 2

    @property
    def c(self) -> float:
        return self.disc + 1

    def generalized(self) -> "GeneralizedParams":
        return self


@dataclass(frozen=True)
class ProblemParams:
    """Dimension N >= 3 and spherical-harmonic degree nu >= 1 with derived scalars."""

    N: int
    nu: int = 1
    mu: float = field(init=False)
    eps: float = field(init=False)
    alpha_nu: float = field(init=False)
    b: float = field(init=False)
    c: float = field(init=False)

    def __post_init__(self):
        N = _check_int("N", self.N, 3)
        nu = _check_int("nu", self.nu, 1)
        mu = N / 2 + nu
        eps = (nu + N - 2) / 2
        # mu^2 - 4 eps == (2nu+N-2)^2/4 - (N-3); written this way it is exact for integers
        disc = math.sqrt((2 * nu + N - 2) ** 2 - 4 * (N - 3)) / 2
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "alpha_nu", float(nu * (nu + N - 2)))
        object.__setattr__(self, "b", (mu - disc) / 2)
        object.__setattr__(self, "c", disc + 1)

    def generalized(self) -> GeneralizedParams:
        return GeneralizedParams(self.mu, self.eps)


def as_generalized(params) -> GeneralizedParams:
    """Accept ProblemParams, GeneralizedParams or a (mu, eps) pair."""
    if isinstance(params, (ProblemParams, GeneralizedParams)):
        return params.generalized()
    mu, eps = params
    return GeneralizedParams(mu, eps)


def best_constant_unconstrained(N: int) -> float:
    N = _check_int("N", N, 1)
    return N * N / 4


def best_constant_curlfree(N: int) -> float:
    N = _check_int("N", N, 1)
    return (N + 2) ** 2 / 4


def best_constant_toroidal(N: int) -> float:
    N = _check_int("N", N, 3)
    return (N + 2) ** 2 / 4


def best_constant_poloidal(N: int, nu: int = 1) -> float:
    N = _check_int("N", N, 3)
    nu = _check_int("nu", nu, 1)
    return (math.sqrt((2 * nu + N - 2) ** 2 - 4 * (N - 3)) + 2) ** 2 / 4


def best_constant_solenoidal(N: int) -> float:
    N = _check_int("N", N, 3)
    return (math.sqrt((N - 2) ** 2 + 8) + 2) ** 2 / 4


def constants_row(N: int) -> dict:
    """All closed-form constants for one dimension, as a flat record."""
    row = {"n": N, "unconstrained": best_constant_unconstrained(N),
           "curl_free": best_constant_curlfree(N)}
    if N >= 3:
        row.update(
            solenoidal=best_constant_solenoidal(N),
            poloidal=best_constant_poloidal(N, 1),
            toroidal=best_constant_toroidal(N),
        )
    return row
