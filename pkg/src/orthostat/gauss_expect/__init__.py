"""Gaussian expectations of tanh observables and the susceptibilities built on them."""

from .activation import TANH, TANH_TAYLOR, ActivationModel
from .quadrature import (
    GaussHermiteRule,
    Kernel2,
    MomentSpec,
    default_rule,
    expect1,
    expect2,
    series_expect1,
)
from .susceptibilities import Susceptibilities, susceptibilities

__all__ = [
    "ActivationModel",
    "GaussHermiteRule",
    "Kernel2",
    "MomentSpec",
    "Susceptibilities",
    "TANH",
    "TANH_TAYLOR",
    "default_rule",
    "expect1",
    "expect2",
    "series_expect1",
    "susceptibilities",
]
