"""Parallel/perpendicular susceptibilities and the auxiliary functions g and h."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from orthostat.gauss_expect.activation import TANH
from orthostat.gauss_expect.quadrature import GaussHermiteRule, default_rule


@dataclass(frozen=True)
class Susceptibilities:
    """chi_par, chi_perp, h and g at one kernel value."""

    chi_par: float
    chi_perp: float
    h: float
    g: float

    def to_dict(self) -> dict[str, float]:
        """Convert to dictionary."""
        return asdict(self)


def susceptibilities(
    K: float, c_w: float, rule: GaussHermiteRule | None = None
) -> Susceptibilities:
    """
    Evaluate the susceptibilities at kernel K.

    chi_par = (C_W/K) <z s s'>, chi_perp = C_W <s'^2>,
    h = (C_W/4K^2) <(z^2 - K) s'^2>, g = <s^2>, all under N(0, K).

    Raises:
        DomainError: If K <= 0.
        NumericalError: If an expectation is not finite.
    """
    rule = rule or default_rule()

    def d1_sq(z: np.ndarray) -> np.ndarray:
        return TANH.derivative(1, z) ** 2

    chi_par = (
        c_w / K * rule.average(lambda z: z * np.tanh(z) * TANH.derivative(1, z), K)
    )
    chi_perp = c_w * rule.average(d1_sq, K)
    # (z^2 - K) is written as K (z^2/K - 1) so small K keeps its relative precision
    h = c_w / (4.0 * K) * rule.average(lambda z: (z * z / K - 1.0) * d1_sq(z), K)
    g = rule.average(lambda z: np.tanh(z) ** 2, K)
    return Susceptibilities(chi_par=chi_par, chi_perp=chi_perp, h=h, g=g)
