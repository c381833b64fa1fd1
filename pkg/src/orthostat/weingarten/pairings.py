"""Pair partitions of {1, ..., 2m} and the cycle types of their compositions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from orthostat.errors import DomainError

MAX_PAIRING_ORDER = 6


@dataclass(frozen=True)
class CycleType:
    """A partition of m, stored with parts in weakly decreasing order."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if not parts or any(p < 1 for p in parts):
            raise DomainError(f"Cycle type needs positive parts, got {self.parts!r}")
        object.__setattr__(self, "parts", tuple(sorted(parts, reverse=True)))

    @classmethod
    def of(cls, *parts: int) -> CycleType:
        """Build a cycle type from its parts in any order."""
        return cls(tuple(parts))

    @property
    def m(self) -> int:
        """Number of boxes (half the number of legs)."""
        return sum(self.parts)

    @property
    def length(self) -> int:
        """Number of parts, written l(lambda)."""
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class Pairing:
    """A perfect matching of {1, ..., 2m} in canonical form.

    Within each pair the smaller index comes first and pairs are sorted by
    their first element, so equality and hashing are structural.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        canonical = tuple(
            sorted((min(a, b), max(a, b)) for a, b in (tuple(p) for p in self.pairs))
        )
        legs = sorted(i for pair in canonical for i in pair)
        if not canonical or legs != list(range(1, 2 * len(canonical) + 1)):
            raise DomainError(
                f"Pairing must cover 1..2m exactly once, got {self.pairs!r}"
            )
        object.__setattr__(self, "pairs", canonical)

    @classmethod
    def from_pairs(cls, *pairs: tuple[int, int]) -> Pairing:
        """Build a pairing from (a, b) tuples, e.g. ``from_pairs((1, 2), (3, 4))``."""
        return cls(tuple(pairs))

    @property
    def m(self) -> int:
        return len(self.pairs)

    def as_involution(self) -> dict[int, int]:
        """Return the pairing as a fixed-point-free involution on 1..2m."""
        involution: dict[int, int] = {}
        for a, b in self.pairs:
            involution[a] = b
            involution[b] = a
        return involution

    def __str__(self) -> str:
        return "".join(f"({a}{b})" if b < 10 else f"({a},{b})" for a, b in self.pairs)


def _all_pairings(items: list[int]) -> Iterator[list[tuple[int, int]]]:
    """Yield all pairings of ``items``, pairing the first item with each later one."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1 :]
        for tail in _all_pairings(remaining):
            yield [(first, partner)] + tail


@lru_cache(maxsize=None)
def _pairings_cached(m: int) -> tuple[Pairing, ...]:
    found = [Pairing(tuple(p)) for p in _all_pairings(list(range(1, 2 * m + 1)))]
    return tuple(sorted(found, key=lambda p: p.pairs))


def enumerate_pairings(m: int) -> list[Pairing]:
    """
    Enumerate all pair partitions of {1, ..., 2m} in lexicographic order.

    Args:
        m: Number of pairs, 1 <= m <= 6.

    Returns:
        The (2m-1)!! canonical pairings.

    Raises:
        DomainError: If m is outside 1..6.
    """
    if not 1 <= m <= MAX_PAIRING_ORDER:
        raise DomainError(f"m must be in 1..{MAX_PAIRING_ORDER}, got {m}")
    return list(_pairings_cached(m))


def coset_cycle_type(pi: Pairing, tau: Pairing) -> CycleType:
    """
    Cycle type of the composition tau o pi of two pairings.

    Each pairing is read as a fixed-point-free involution. The cycles of the
    composition come in twins of equal length; one length per twin is kept.

    Raises:
        DomainError: If the pairings have different m.
    """
    if pi.m != tau.m:
        raise DomainError(f"Pairings have different m: {pi.m} and {tau.m}")
    p = pi.as_involution()
    t = tau.as_involution()
    seen: set[int] = set()
    lengths: list[int] = []
    for start in range(1, 2 * pi.m + 1):
        if start in seen:
            continue
        length = 0
        i = start
        while i not in seen:
            seen.add(i)
            i = t[p[i]]
            length += 1
        lengths.append(length)
    lengths.sort(reverse=True)
    return CycleType(tuple(lengths[::2]))


def pairing_delta(pairing: Pairing, indices: Sequence[int]) -> bool:
    """Return True when ``indices`` agree on every pair of ``pairing``."""
    if len(indices) != 2 * pairing.m:
        raise DomainError(
            f"Need {2 * pairing.m} indices for this pairing, got {len(indices)}"
        )
    return all(indices[a - 1] == indices[b - 1] for a, b in pairing.pairs)
