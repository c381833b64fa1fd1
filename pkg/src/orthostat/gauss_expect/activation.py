"""tanh activation: closed-form derivatives and Taylor coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from numpy.polynomial import Polynomial

from orthostat.errors import DomainError

# sigma_m = tanh^(m)(0) for m = 0..20
TANH_TAYLOR: tuple[int, ...] = (
    0,
    1,
    0,
    -2,
    0,
    16,
    0,
    -272,
    0,
    7936,
    0,
    -353792,
    0,
    22368256,
    0,
    -1903757312,
    0,
    209865342976,
    0,
    -29088885112832,
    0,
)

MAX_DERIVATIVE = 4


@dataclass(frozen=True)
class ActivationModel:
    """tanh with derivative evaluators up to the fourth and its Taylor data."""

    taylor: tuple[int, ...] = TANH_TAYLOR

    @property
    def max_taylor_order(self) -> int:
        return len(self.taylor) - 1

    def derivative(self, order: int, z: np.ndarray | float) -> np.ndarray:
        """
        Evaluate the order-th derivative of tanh in closed form.

        All derivatives are polynomials in t = tanh(z) times s = 1 - t^2.
        """
        t = np.tanh(z)
        if order == 0:
            return t
        s = 1.0 - t * t
        if order == 1:
            return s
        if order == 2:
            return -2.0 * t * s
        if order == 3:
            return s * (6.0 * t * t - 2.0)
        if order == 4:
            return 8.0 * t * s * (2.0 - 3.0 * t * t)
        raise DomainError(f"Derivative order must be in 0..{MAX_DERIVATIVE}")

    def polynomial(self, order: int, degree: int) -> Polynomial:
        """Taylor polynomial of the order-th derivative, truncated at ``degree``."""
        if order + degree > self.max_taylor_order:
            raise DomainError(
                f"Taylor data reaches m={self.max_taylor_order}; "
                f"derivative {order} to degree {degree} needs m={order + degree}"
            )
        coef = [self.taylor[m + order] / factorial(m) for m in range(degree + 1)]
        return Polynomial(coef)


TANH = ActivationModel()
