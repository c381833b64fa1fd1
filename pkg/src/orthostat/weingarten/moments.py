"""Moments of Haar-orthogonal matrix entries via the Weingarten formula."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from orthostat.errors import DomainError, UnsupportedError
from orthostat.weingarten.functions import weingarten_exact_k2, weingarten_series
from orthostat.weingarten.pairings import (
    coset_cycle_type,
    enumerate_pairings,
    pairing_delta,
)

MAX_MOMENT_ORDER = 3


def orthogonal_moment(
    n: int,
    c_w: float,
    row_indices: Sequence[int],
    col_indices: Sequence[int],
) -> float:
    """
    E[W_{i1 j1} ... W_{i2k j2k}] for W = sqrt(C_W) * O with O Haar on O(n).

    Sums W[coset type(pi, sigma)] over all pairings pi, sigma whose deltas
    match the row and column indices. Exact rationals are used for k <= 2,
    the 1/n^5 series for k = 3.

    Args:
        n: Matrix size.
        c_w: Weight variance scale C_W.
        row_indices: Row index of each factor (1-based).
        col_indices: Column index of each factor (1-based).

    Returns:
        The moment. Odd moments vanish and return 0.0.

    Raises:
        DomainError: On mismatched lengths or indices outside 1..n.
        UnsupportedError: If k > 3.
    """
    if len(row_indices) != len(col_indices):
        raise DomainError(
            f"Row and column index lists differ in length: "
            f"{len(row_indices)} != {len(col_indices)}"
        )
    if any(not 1 <= i <= n for i in (*row_indices, *col_indices)):
        raise DomainError(f"Indices must lie in 1..{n}")
    if len(row_indices) % 2:
        return 0.0
    k = len(row_indices) // 2
    if k == 0:
        return 1.0
    if k > MAX_MOMENT_ORDER:
        raise UnsupportedError(
            f"Moments of order 2k={2 * k} need k <= {MAX_MOMENT_ORDER}"
        )

    pairings = enumerate_pairings(k)
    row_matches = [p for p in pairings if pairing_delta(p, row_indices)]
    col_matches = [p for p in pairings if pairing_delta(p, col_indices)]

    if k <= 2:
        exact = Fraction(0)
        for pi in row_matches:
            for sigma in col_matches:
                exact += weingarten_exact_k2(n, coset_cycle_type(pi, sigma))
        return float(exact) * c_w**k

    total = 0.0
    for pi in row_matches:
        for sigma in col_matches:
            total += weingarten_series(n, coset_cycle_type(pi, sigma))
    return total * c_w**k
