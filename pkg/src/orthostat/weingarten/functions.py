"""Orthogonal Weingarten functions: exact k <= 2 values, 1/n series and coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from orthostat.errors import DomainError, UnsupportedError
from orthostat.weingarten.pairings import CycleType

MAX_SERIES_ORDER = 5

# (power of 1/n, coefficient) through 1/n^5; W[1] is exact.
_SERIES: dict[tuple[int, ...], tuple[tuple[int, Fraction], ...]] = {
    (1,): ((1, Fraction(1)),),
    (1, 1): ((2, Fraction(1)), (4, Fraction(2)), (5, Fraction(-2))),
    (2,): ((3, Fraction(-1)), (4, Fraction(1)), (5, Fraction(-3))),
    (1, 1, 1): ((3, Fraction(1)), (5, Fraction(6))),
    (2, 1): ((4, Fraction(-1)), (5, Fraction(1))),
    (3,): ((5, Fraction(2)),),
}


@dataclass(frozen=True)
class WeingartenValue:
    """A Weingarten value as an exact rational, a 1/n series, or both."""

    exact: Fraction | None = None
    series: tuple[tuple[int, Fraction], ...] | None = None

    def __post_init__(self) -> None:
        if self.exact is None and self.series is None:
            raise DomainError("WeingartenValue needs an exact value or a series")
        if self.series is not None:
            powers = [p for p, _ in self.series]
            if any(b <= a for a, b in zip(powers, powers[1:])):
                raise DomainError(f"Series powers must increase, got {powers}")

    def evaluate(self, n: int, order: int = MAX_SERIES_ORDER) -> float:
        """Exact value when known, otherwise the series truncated at ``order``."""
        if self.exact is not None:
            return float(self.exact)
        assert self.series is not None
        return float(sum(c / Fraction(n) ** p for p, c in self.series if p <= order))


def _as_cycle_type(lam: CycleType | tuple[int, ...]) -> CycleType:
    return lam if isinstance(lam, CycleType) else CycleType(tuple(lam))


def weingarten_exact_k2(n: int, lam: CycleType | tuple[int, ...]) -> Fraction:
    """
    Exact orthogonal Weingarten function for m = 1 or 2.

    Args:
        n: Matrix size, n >= 3.
        lam: Cycle type (1), (1,1) or (2).

    Returns:
        W[lam] as an exact rational.

    Raises:
        DomainError: If n < 3.
        UnsupportedError: If lam has m > 2; use weingarten_series instead.
    """
    lam = _as_cycle_type(lam)
    if n < 3:
        raise DomainError(f"Exact Weingarten values need n >= 3, got {n}")
    if lam.m > 2:
        raise UnsupportedError(
            f"No closed form for cycle type {lam}; use weingarten_series"
        )
    if lam.parts == (1,):
        return Fraction(1, n)
    denominator = (n - 1) * n * (n + 2)
    if lam.parts == (1, 1):
        return Fraction(n + 1, denominator)
    return Fraction(-1, denominator)


def weingarten_series(
    n: int, lam: CycleType | tuple[int, ...], order: int = MAX_SERIES_ORDER
) -> float:
    """
    Large-n series of the Weingarten function, truncated after 1/n^order.

    W[1] = 1/n is returned exactly for any order.

    Raises:
        DomainError: If order > 5 or n < 1.
        UnsupportedError: If lam has m > 3.
    """
    lam = _as_cycle_type(lam)
    if order > MAX_SERIES_ORDER:
        raise DomainError(
            f"Series known through 1/n^{MAX_SERIES_ORDER}, requested order {order}"
        )
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if lam.m > 3:
        raise UnsupportedError(f"No Weingarten series for cycle type {lam} (m > 3)")
    if lam.parts == (1,):
        return 1.0 / n
    return WeingartenValue(series=_SERIES[lam.parts]).evaluate(n, order)


def weingarten_value(n: int, lam: CycleType | tuple[int, ...]) -> WeingartenValue:
    """Everything known about W[lam] at size n: exact for m <= 2, series for m = 3."""
    lam = _as_cycle_type(lam)
    if lam.m > 3:
        raise UnsupportedError(f"No Weingarten data for cycle type {lam} (m > 3)")
    series = _SERIES[lam.parts]
    if lam.m <= 2 and n >= 3:
        return WeingartenValue(exact=weingarten_exact_k2(n, lam), series=series)
    if lam.parts == (1,) and n >= 1:
        return WeingartenValue(exact=Fraction(1, n), series=series)
    return WeingartenValue(series=series)


def catalan(k: int) -> int:
    """k-th Catalan number."""
    if k < 0:
        raise DomainError(f"Catalan index must be >= 0, got {k}")
    return comb(2 * k, k) // (k + 1)


def beta_leading(lam: CycleType | tuple[int, ...]) -> int:
    """Leading large-n coefficient: product of (-1)^(p-1) * Catalan(p-1) over parts."""
    lam = _as_cycle_type(lam)
    beta = 1
    for part in lam.parts:
        beta *= (-1) ** (part - 1) * catalan(part - 1)
    return beta


def mobius_coefficient(s: int) -> int:
    """Weight (-1)^(s-1) (s-1)! of an s-block partition."""
    if s < 1:
        raise DomainError(f"Block count must be >= 1, got {s}")
    return (-1) ** (s - 1) * factorial(s - 1)


def cycle_types(m: int) -> list[CycleType]:
    """Integer partitions of m as cycle types, largest part first."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")

    def parts(total: int, largest: int) -> list[tuple[int, ...]]:
        if total == 0:
            return [()]
        return [
            (p, *rest)
            for p in range(min(total, largest), 0, -1)
            for rest in parts(total - p, p)
        ]

    return [CycleType(p) for p in parts(m, m)]
