"""Orthogonal Weingarten calculus: pairings, Weingarten values and Haar moments."""

from .functions import (
    WeingartenValue,
    beta_leading,
    catalan,
    cycle_types,
    mobius_coefficient,
    weingarten_exact_k2,
    weingarten_series,
    weingarten_value,
)
from .moments import orthogonal_moment
from .pairings import (
    CycleType,
    Pairing,
    coset_cycle_type,
    enumerate_pairings,
    pairing_delta,
)

__all__ = [
    "CycleType",
    "Pairing",
    "WeingartenValue",
    "beta_leading",
    "catalan",
    "coset_cycle_type",
    "cycle_types",
    "enumerate_pairings",
    "mobius_coefficient",
    "orthogonal_moment",
    "pairing_delta",
    "weingarten_exact_k2",
    "weingarten_series",
    "weingarten_value",
]
