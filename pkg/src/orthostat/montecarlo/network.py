"""
Finite-width tanh MLP: forward pass and layer-wise empirical NTK.

The NTK is propagated as a full n x n matrix per input pair with
Theta^(1) = delta (lambda_b + (lambda_W/n) x.x) and
Theta^(l+1) = delta (lambda_b + (lambda_W/n) s.s) + W diag(s') Theta^(l) diag(s') W^T.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from orthostat.errors import DomainError
from orthostat.recursion import NetworkConfig

from .rng import RngStream, as_generator
from .sampling import sample_gaussian, sample_orthogonal

MAX_NTK_WIDTH = 512


@dataclass(frozen=True)
class SimState:
    """
    Per-layer preactivations and empirical NTK of one sampled network.

    ``z[l]`` has shape (n,) for one input or (n, a) for ``a`` inputs;
    ``ntk[l]`` has shape (n, n) or (a, a, n, n) respectively.
    """

    z: tuple[np.ndarray, ...]
    ntk: tuple[np.ndarray, ...] | None = None

    @property
    def depth(self) -> int:
        return len(self.z)

    @property
    def width(self) -> int:
        return int(self.z[0].shape[0])


def _as_inputs(x: Any, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2) or x.shape[0] != n:
        raise DomainError(f"Input must have shape ({n},) or ({n}, a), got {x.shape}")
    return x


def forward(weights: Sequence[np.ndarray], x: Any) -> list[np.ndarray]:
    """
    Preactivations z^(1) = W^(1) x and z^(l+1) = W^(l+1) tanh(z^(l)).

    Raises:
        DomainError: On inconsistent shapes.
    """
    if not weights:
        raise DomainError("At least one weight matrix is required")
    n = weights[0].shape[1]
    z = weights[0] @ _as_inputs(x, n)
    zs = [z]
    for w in weights[1:]:
        if w.shape[1] != z.shape[0]:
            raise DomainError(
                f"Weight shape {w.shape} does not fit width {z.shape[0]}"
            )
        z = w @ np.tanh(z)
        zs.append(z)
    return zs


def ntk_forward(
    weights: Sequence[np.ndarray],
    x: Any,
    cfg: NetworkConfig,
    zs: Sequence[np.ndarray] | None = None,
) -> list[np.ndarray]:
    """
    Layer-wise empirical NTK by exact forward propagation.

    Args:
        weights: One (n, n) matrix per layer.
        x: One input (n,) or several inputs as columns (n, a).
        cfg: Supplies the lambda_b and lambda_W schedules.
        zs: Preactivations from ``forward``; recomputed when omitted.

    Returns:
        Per-layer NTK, (n, n) for one input or (a, a, n, n) for several.

    Raises:
        DomainError: If n exceeds the memory guard.
    """
    n = weights[0].shape[0]
    if n > MAX_NTK_WIDTH:
        raise DomainError(
            f"Width {n} exceeds the NTK memory guard ({MAX_NTK_WIDTH})"
        )
    single = np.asarray(x).ndim == 1
    inputs = _as_inputs(x, n)
    if single:
        inputs = inputs[:, np.newaxis]
    if zs is None:
        zs = forward(weights, inputs)
    eye = np.eye(n)

    def diagonal_term(ell: int, s: np.ndarray) -> np.ndarray:
        gram = s.T @ s / n
        return (cfg.lambda_b(ell) + cfg.lambda_w(ell) * gram)[..., None, None] * eye

    theta = diagonal_term(1, inputs)
    out = [theta]
    for ell, (w, z) in enumerate(zip(weights[1:], zs[:-1]), start=2):
        z = z if z.ndim == 2 else z[:, np.newaxis]
        s = np.tanh(z)
        d = (1.0 - s * s).T
        inner = d[:, None, :, None] * theta * d[None, :, None, :]
        theta = diagonal_term(ell, s) + w @ inner @ w.T
        out.append(theta)
    if single:
        return [t[0, 0] for t in out]
    return out


def sample_weights(
    cfg: NetworkConfig, rng: RngStream | np.random.Generator
) -> list[np.ndarray]:
    """One weight matrix per layer from the configured ensemble."""
    gen = as_generator(rng)
    draw = sample_orthogonal if cfg.is_orthogonal else sample_gaussian
    return [draw(cfg.n, cfg.c_w, gen) for _ in range(cfg.depth)]


def simulate_network(
    x: Any,
    cfg: NetworkConfig,
    rng: RngStream | np.random.Generator,
    with_ntk: bool = True,
) -> SimState:
    """Sample a network on ``rng`` and record its preactivations and NTK."""
    weights = sample_weights(cfg, rng)
    zs = forward(weights, x)
    ntk = ntk_forward(weights, x, cfg, zs) if with_ntk else None
    return SimState(tuple(zs), None if ntk is None else tuple(ntk))
