"""
Gauss-Hermite expectations of tanh observables under one- and two-variable Gaussians.

scipy.special.roots_hermite gives nodes/weights for integrals against
exp(-x^2). With z = sqrt(2) x and weights w / sqrt(pi) the rule integrates
against the standard normal density and its weights sum to one; scaling the
nodes by sqrt(K) gives expectations at variance K.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import roots_hermite  # type: ignore[import-untyped]

from orthostat.errors import DomainError, NumericalError
from orthostat.gauss_expect.activation import MAX_DERIVATIVE, TANH, ActivationModel


DEFAULT_QUADRATURE_NODES = 200
MAX_FACTORS = 6
MAX_Z_POWER = 2
DEGENERATE_DET_TOL = 1e-14

Integrand = Callable[[np.ndarray], np.ndarray]


def _get_quadrature_nodes() -> int:
    """Node count from ORTHOSTAT_QUADRATURE_NODES (default 200, clamped to 20..1000)."""
    raw = os.environ.get("ORTHOSTAT_QUADRATURE_NODES", "").strip()
    if not raw:
        return DEFAULT_QUADRATURE_NODES
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_QUADRATURE_NODES
    return max(20, min(1000, value))


@dataclass(frozen=True)
class MomentSpec:
    """
    A product of tanh derivatives and explicit z factors.

    ``derivatives`` lists the derivative order of each activation factor
    (0 for sigma itself); ``z_power`` counts explicit z factors.
    """

    derivatives: tuple[int, ...]
    z_power: int = 0

    def __post_init__(self) -> None:
        orders = tuple(sorted(int(d) for d in self.derivatives))
        if len(orders) > MAX_FACTORS:
            raise DomainError(f"At most {MAX_FACTORS} activation factors allowed")
        if any(not 0 <= d <= MAX_DERIVATIVE for d in orders):
            raise DomainError(f"Derivative orders must lie in 0..{MAX_DERIVATIVE}")
        if not 0 <= self.z_power <= MAX_Z_POWER:
            raise DomainError(f"At most {MAX_Z_POWER} explicit z factors allowed")
        object.__setattr__(self, "derivatives", orders)

    @classmethod
    def of(cls, *derivatives: int, z: int = 0) -> MomentSpec:
        """``MomentSpec.of(2, 1, 1, 0)`` is sigma'' sigma' sigma' sigma."""
        return cls(tuple(derivatives), z)

    def integrand(self, model: ActivationModel = TANH) -> Integrand:
        """Return f(z) = z^p * prod of the listed derivatives."""

        def f(z: np.ndarray) -> np.ndarray:
            out = np.ones_like(z) if self.z_power == 0 else z**self.z_power
            for order in self.derivatives:
                out = out * model.derivative(order, z)
            return out

        return f

    def __str__(self) -> str:
        names = ["z"] * self.z_power + [
            "sigma" + "'" * d if d < 4 else "sigma''''" for d in self.derivatives
        ]
        return "<" + " ".join(names) + ">"


@dataclass(frozen=True)
class Kernel2:
    """Covariance of two preactivations; positive semidefinite."""

    k11: float
    k22: float
    k12: float

    def __post_init__(self) -> None:
        if not (self.k11 > 0 and self.k22 > 0):
            raise DomainError(
                f"Kernel diagonal must be positive, got k11={self.k11!r} "
                f"k22={self.k22!r}"
            )
        if self.det < -DEGENERATE_DET_TOL * self.k11 * self.k22:
            raise DomainError(f"Kernel is indefinite: {self!r}")

    @property
    def det(self) -> float:
        return self.k11 * self.k22 - self.k12 * self.k12

    @property
    def is_degenerate(self) -> bool:
        return abs(self.det) < DEGENERATE_DET_TOL * self.k11 * self.k22

    def transposed(self) -> Kernel2:
        """Swap the two variables."""
        return Kernel2(self.k22, self.k11, self.k12)

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.k11, self.k12], [self.k12, self.k22]])


@dataclass(frozen=True, eq=False)
class GaussHermiteRule:
    """Standard-normal Gauss-Hermite nodes ``z`` and weights ``w`` (sum(w) = 1)."""

    z: np.ndarray
    w: np.ndarray

    @classmethod
    def build(cls, order: int) -> GaussHermiteRule:
        if order < 2:
            raise DomainError(f"Quadrature order must be >= 2, got {order}")
        x, w = roots_hermite(order)
        return cls(z=np.sqrt(2.0) * x, w=w / np.sqrt(np.pi))

    @property
    def order(self) -> int:
        return int(self.z.shape[0])

    def average(self, fn: Integrand, K: float) -> float:
        """E[fn(z)] for z ~ N(0, K)."""
        if not K > 0:
            raise DomainError(f"Variance must be positive, got K={K!r}")
        value = float(self.w @ fn(np.sqrt(K) * self.z))
        if not np.isfinite(value):
            raise NumericalError(f"Non-finite Gaussian average at K={K!r}")
        return value

    def average2(self, fn_a: Integrand, fn_b: Integrand, kernel: Kernel2) -> float:
        """E[fn_a(z1) fn_b(z2)] for (z1, z2) ~ N(0, kernel)."""
        if kernel.is_degenerate:
            sign = 1.0 if kernel.k12 >= 0 else -1.0
            z1 = np.sqrt(kernel.k11) * self.z
            z2 = sign * np.sqrt(kernel.k22) * self.z
            value = float(self.w @ (fn_a(z1) * fn_b(z2)))
        else:
            l11 = np.sqrt(kernel.k11)
            l21 = kernel.k12 / l11
            l22 = np.sqrt(max(kernel.k22 - l21 * l21, 0.0))
            outer = fn_a(l11 * self.z)
            inner = fn_b(l21 * self.z[:, None] + l22 * self.z[None, :])
            value = float((self.w * outer) @ (inner @ self.w))
        if not np.isfinite(value):
            raise NumericalError(f"Non-finite bivariate Gaussian average at {kernel!r}")
        return value


@lru_cache(maxsize=8)
def _rule_cached(order: int) -> GaussHermiteRule:
    return GaussHermiteRule.build(order)


def default_rule() -> GaussHermiteRule:
    """Process-wide rule with the configured node count."""
    return _rule_cached(_get_quadrature_nodes())


def expect1(
    spec: MomentSpec,
    K: float,
    rule: GaussHermiteRule | None = None,
    model: ActivationModel = TANH,
) -> float:
    """
    Gaussian expectation of ``spec`` at variance K.

    Raises:
        DomainError: If K <= 0.
        NumericalError: If the result is not finite.
    """
    rule = rule or default_rule()
    return rule.average(spec.integrand(model), K)


def expect2(
    spec_a: MomentSpec,
    spec_b: MomentSpec,
    K: Kernel2,
    rule: GaussHermiteRule | None = None,
    model: ActivationModel = TANH,
) -> float:
    """
    E[f(z1) g(z2)] for (z1, z2) with covariance K.

    A rank-one K collapses both variables onto one Gaussian.
    """
    rule = rule or default_rule()
    return rule.average2(spec_a.integrand(model), spec_b.integrand(model), K)


def _gaussian_moment(power: int, K: float) -> float:
    """E[z^power] for z ~ N(0, K)."""
    if power % 2:
        return 0.0
    half = power // 2
    return prod(range(1, power, 2)) * K**half


def series_expect1(
    spec: MomentSpec,
    K: float,
    degree: int | None = None,
    model: ActivationModel = TANH,
) -> float:
    """
    Small-K expectation of ``spec`` from the Taylor coefficients by Wick's rule.

    Each factor is expanded to ``degree`` and the product is truncated at the
    same degree, so every kept monomial is exact; E[z^2p] = (2p-1)!! K^p.

    Args:
        spec: Observable to expand.
        K: Variance.
        degree: Truncation degree; defaults to the largest the Taylor data allows.
    """
    top = max(spec.derivatives, default=0)
    limit = model.max_taylor_order - top
    degree = limit if degree is None else degree
    if degree > limit:
        raise DomainError(f"Series degree {degree} exceeds the available {limit}")
    poly = Polynomial([0.0] * spec.z_power + [1.0])
    for order in spec.derivatives:
        poly = (poly * model.polynomial(order, degree)).cutdeg(degree)
    return float(
        sum(c * _gaussian_moment(p, K) for p, c in enumerate(poly.coef) if p <= degree)
    )
