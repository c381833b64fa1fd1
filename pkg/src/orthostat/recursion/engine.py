"""
Layer-by-layer iteration of the infinite-width kernels and the 1/n tensors.

Every update reads the layer-ell snapshot; the only layer-(ell+1) input is
F in the Q update. Evaluation order: K, Theta, V4, F, D, B, A, P, Q, S, U,
R, T, V6.
"""

from __future__ import annotations

import logging
import math
from typing import Any, Sequence

import numpy as np

from orthostat.errors import DomainError, NumericalError
from orthostat.gauss_expect import (
    Kernel2,
    MomentSpec,
    expect1,
    expect2,
    susceptibilities,
)
from orthostat.recursion.models import (
    TENSOR_NAMES,
    LayerState,
    NetworkConfig,
    NormalizedState,
    TensorRecord,
    Trajectory,
)

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS: tuple[str, ...] = ("ell", "K", "Theta", *TENSOR_NAMES)
PAIR_COLUMNS: tuple[str, ...] = (
    "ell",
    "K11",
    "K22",
    "K12",
    "Theta11",
    "Theta22",
    "Theta12",
)
NORMALIZED_COLUMNS: tuple[str, ...] = ("ell", *TENSOR_NAMES)

_SIGMA = MomentSpec.of(0)
_SIGMA_SQ = MomentSpec.of(0, 0)
_D1 = MomentSpec.of(1)
_D1_SQ = MomentSpec.of(1, 1)

# Single-variable expectations entering the tensor recursions.
_TENSOR_MOMENTS: dict[str, MomentSpec] = {
    "s4": MomentSpec.of(0, 0, 0, 0),
    "s6": MomentSpec.of(0, 0, 0, 0, 0, 0),
    "s2d1s": MomentSpec.of(0, 0, 1, 1),
    "s3d2": MomentSpec.of(0, 0, 0, 2),
    "d1s": MomentSpec.of(1, 1),
    "d1q": MomentSpec.of(1, 1, 1, 1),
    "d2s": MomentSpec.of(2, 0),
    "d2d1d1s": MomentSpec.of(2, 1, 1, 0),
    "d2sq": MomentSpec.of(2, 2),
    "d2sq_d1sq": MomentSpec.of(2, 2, 1, 1),
    "d3d1": MomentSpec.of(3, 1),
    "d3d1c": MomentSpec.of(3, 1, 1, 1),
    "sd4": MomentSpec.of(4, 0),
    "zd1s": MomentSpec.of(1, 0, z=1),
    "zd2d1": MomentSpec.of(2, 1, z=1),
}


def init_from_input(x: Any, cfg: NetworkConfig) -> LayerState:
    """
    Layer-1 state from the network input.

    K = (C_W/n) x.x, Theta = lambda_b(1) + (lambda_W(1)/n) x.x and, for
    orthogonal weights, V4 = -2 K^2 and V6 = 16 K^3 (the leading Haar
    cumulants of z = W x). All other tensors start at zero. Passing two
    vectors (shape (2, n)) selects pair mode, which tracks K and Theta only.

    Raises:
        DomainError: If the input length differs from cfg.n.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2) or (x.ndim == 2 and x.shape[0] != 2):
        raise DomainError(
            f"Input must be one vector or a pair of vectors, got shape {x.shape}"
        )
    if x.shape[-1] != cfg.n:
        raise DomainError(f"Input length {x.shape[-1]} does not match n={cfg.n}")

    lb, lw = cfg.lambda_b(1), cfg.lambda_w(1)
    if x.ndim == 2:
        gram = x @ x.T / cfg.n
        return LayerState(
            ell=1,
            K=Kernel2(
                cfg.c_w * gram[0, 0], cfg.c_w * gram[1, 1], cfg.c_w * gram[0, 1]
            ),
            theta=Kernel2(
                lb + lw * gram[0, 0], lb + lw * gram[1, 1], lb + lw * gram[0, 1]
            ),
        )

    sq = float(x @ x) / cfg.n
    K = cfg.c_w * sq
    tensors = (
        TensorRecord(V4=-2.0 * K**2, V6=16.0 * K**3)
        if cfg.is_orthogonal
        else TensorRecord()
    )
    return LayerState(ell=1, K=K, theta=lb + lw * sq, tensors=tensors)


def _require_positive(K: float) -> None:
    if not K > 0:
        raise DomainError(f"Degenerate kernel K={K!r}; the recursion needs K > 0")


def step_kernel(state: LayerState, cfg: NetworkConfig) -> float | Kernel2:
    """K at ell+1: C_W <sigma sigma> under the layer-ell kernel."""
    if isinstance(state.K, Kernel2):
        K = state.K
        return Kernel2(
            cfg.c_w * expect1(_SIGMA_SQ, K.k11),
            cfg.c_w * expect1(_SIGMA_SQ, K.k22),
            cfg.c_w * expect2(_SIGMA, _SIGMA, K),
        )
    _require_positive(state.K)
    return cfg.c_w * expect1(_SIGMA_SQ, state.K)


def step_ntk(state: LayerState, cfg: NetworkConfig) -> float | Kernel2:
    """Theta at ell+1: lambda_b + lambda_W <sigma sigma> + C_W <sigma' sigma'> Theta."""
    ell = state.ell + 1
    lb, lw = cfg.lambda_b(ell), cfg.lambda_w(ell)
    if isinstance(state.K, Kernel2):
        K, theta = state.K, state.theta
        assert isinstance(theta, Kernel2)

        def diagonal(k: float, t: float) -> float:
            return lb + lw * expect1(_SIGMA_SQ, k) + cfg.c_w * expect1(_D1_SQ, k) * t

        return Kernel2(
            diagonal(K.k11, theta.k11),
            diagonal(K.k22, theta.k22),
            lb
            + lw * expect2(_SIGMA, _SIGMA, K)
            + cfg.c_w * expect2(_D1, _D1, K) * theta.k12,
        )
    _require_positive(state.K)
    theta_val = float(state.theta)  # type: ignore[arg-type]
    return (
        lb
        + lw * expect1(_SIGMA_SQ, state.K)
        + cfg.c_w * expect1(_D1_SQ, state.K) * theta_val
    )


def _checked(name: str, value: float, ell: int) -> float:
    if not math.isfinite(value):
        raise NumericalError(f"Tensor {name} is not finite at layer {ell + 1}")
    return value


def step_tensors_single(state: LayerState, cfg: NetworkConfig) -> TensorRecord:
    """
    Advance V4, D, F, A, B, P, Q, R, S, T, U and V6 by one layer.

    Raises:
        DomainError: In pair mode or for a non-positive kernel.
        NumericalError: If an updated tensor is not finite; names the tensor.
    """
    if state.is_pair or state.tensors is None:
        raise DomainError("Tensor recursions are defined for a single input only")
    K = float(state.K)  # type: ignore[arg-type]
    _require_positive(K)
    th = float(state.theta)  # type: ignore[arg-type]
    old = state.tensors
    ell = state.ell
    cw = cfg.c_w
    lw = cfg.lambda_w(ell + 1)
    r = lw / cw

    sus = susceptibilities(K, cw)
    cp, cq, h, g = sus.chi_par, sus.chi_perp, sus.h, sus.g
    e = {key: expect1(spec, K) for key, spec in _TENSOR_MOMENTS.items()}

    def check(name: str, value: float) -> float:
        return _checked(name, value, ell)

    if cfg.is_orthogonal:
        v4_source = cw**2 * (e["s4"] - 3.0 * g**2)
        v6_source = cw**3 * (e["s6"] - 15.0 * e["s4"] * g + 30.0 * g**3)
        v6_mixed = (
            3.0 * e["s2d1s"] + e["s3d2"] - 3.0 * e["d1s"] * g - 3.0 * g * e["d2s"]
        )
    else:
        v4_source = cw**2 * (e["s4"] - g**2)
        v6_source = cw**3 * (e["s6"] - 3.0 * e["s4"] * g + 2.0 * g**3)
        v6_mixed = 3.0 * e["s2d1s"] + e["s3d2"] - e["d1s"] * g - g * e["d2s"]

    V4 = check("V4", v4_source + cp**2 * old.V4)

    f_source = e["s2d1s"] - g * e["d1s"]
    if f_source < -1e-12:
        logger.debug("f_source_negative: ell=%d value=%r", ell, f_source)
    F = check("F", cp**2 * old.F + cw**2 * f_source * th)

    vertex = cw**2 * e["s4"] - (cw * g) ** 2 + cp**2 * old.V4
    mixed = cw**2 * e["s2d1s"] - cw * g * cq + 2.0 * h * cp * old.V4
    D = check("D", cq * cp * old.D + r * vertex + th * mixed)

    B = check("B", cq**2 * old.B + cw**2 * (e["d1q"] - e["d1s"] ** 2) * th**2)

    A = check(
        "A",
        cq**2 * old.A
        + r**2 * vertex
        + 2.0 * r * th * mixed
        + 2.0 * r * cq * cp * old.D
        + 4.0 * h * cq * th * old.D
        + th**2 * (cw**2 * e["d1q"] - cq**2 + (2.0 * h) ** 2 * old.V4),
    )

    dntk_source = cw**2 * e["d2d1d1s"] * th**2
    dntk_decay = cw * cq * e["d2s"] + cq**2
    P = check("P", dntk_source + cw * cq * e["d2s"] * old.B + dntk_decay * old.P)
    Q = check(
        "Q",
        dntk_source + r * F + 2.0 * h * cp * th * old.F + dntk_decay * old.Q,
    )

    S = check(
        "S",
        cq**2 * old.S
        + lw * cw * e["d1q"] * th**2
        + cw**2 * e["d2sq_d1sq"] * th**3
        + cq * (lw * e["d1s"] + cw * th * e["d2sq"]) * old.B,
    )
    U = check("U", cq**2 * old.U + cw**2 * e["d2sq_d1sq"] * th**3)

    R = check(
        "R",
        cq**2 * old.R
        + lw * cw * e["d2d1d1s"] * th**2
        + cw**2 * e["d3d1c"] * th**3
        + cq * (lw * e["d2s"] + cw * th * e["d3d1"]) * (old.B + old.P)
        + cq * (lw * e["d1s"] + cw * th * e["d2sq"]) * old.P,
    )
    T = check(
        "T",
        cq**2 * old.T
        + 2.0 * cw * lw * e["d2d1d1s"] * th**2
        + cw**2 * e["d2sq_d1sq"] * th**3
        + lw**2 * th * e["s2d1s"]
        + (lw * e["zd1s"] + cw * th * e["zd2d1"]) ** 2 * old.F / K**2
        + 2.0
        * cq
        * (lw * (e["d2s"] + e["d1s"]) + cw * th * (e["d3d1"] + e["d2sq"]))
        * old.Q,
    )

    # Equal widths: the n_l / n_{l-1} factors of the sextic update are 1.
    V6 = check(
        "V6",
        v6_source
        + 6.0 * cw**2 * old.V4 * cp * v6_mixed
        + 1.5 * cw * cp**2 * old.V4**2 * (3.0 * e["d2sq"] + 4.0 * e["d3d1"] + e["sd4"])
        + cp**3 * old.V6,
    )

    return TensorRecord(
        V4=V4, D=D, F=F, A=A, B=B, P=P, Q=Q, R=R, S=S, T=T, U=U, V6=V6
    )


def run(x: Any, cfg: NetworkConfig) -> Trajectory:
    """
    Iterate the recursions from layer 1 to cfg.depth.

    Args:
        x: One input vector of length n, or two (shape (2, n)) for pair mode.
        cfg: Network configuration.

    Returns:
        Trajectory with cfg.depth states.
    """
    state = init_from_input(x, cfg)
    states = [state]
    for _ in range(cfg.depth - 1):
        K = step_kernel(state, cfg)
        theta = step_ntk(state, cfg)
        tensors = None if state.is_pair else step_tensors_single(state, cfg)
        state = LayerState(ell=state.ell + 1, K=K, theta=theta, tensors=tensors)
        states.append(state)
    return Trajectory(states)


def normalize(trajectory: Trajectory) -> list[NormalizedState]:
    """
    Dimensionless tensors per layer.

    D, F over K Theta; A, B, P, Q over Theta^2; R, S, T, U times K over
    Theta^3; V4 over K^2; V6 over K^3.

    Raises:
        DomainError: In pair mode or when K or Theta is not positive.
    """
    if trajectory.is_pair:
        raise DomainError("Normalized tensors are defined for a single input only")
    out: list[NormalizedState] = []
    for state in trajectory:
        K = float(state.K)  # type: ignore[arg-type]
        th = float(state.theta)  # type: ignore[arg-type]
        if not (K > 0 and th > 0):
            raise DomainError(
                f"Cannot normalize layer {state.ell}: K={K!r} Theta={th!r}"
            )
        t = state.tensors
        assert t is not None
        out.append(
            NormalizedState(
                ell=state.ell,
                V4=t.V4 / K**2,
                D=t.D / (K * th),
                F=t.F / (K * th),
                A=t.A / th**2,
                B=t.B / th**2,
                P=t.P / th**2,
                Q=t.Q / th**2,
                R=t.R * K / th**3,
                S=t.S * K / th**3,
                T=t.T * K / th**3,
                U=t.U * K / th**3,
                V6=t.V6 / K**3,
            )
        )
    return out


def trajectory_rows(trajectory: Trajectory) -> list[dict[str, float]]:
    """Rows for the raw trajectory CSV (pair mode uses the 2x2 entries)."""
    rows: list[dict[str, float]] = []
    for state in trajectory:
        if isinstance(state.K, Kernel2):
            theta = state.theta
            assert isinstance(theta, Kernel2)
            rows.append(
                {
                    "ell": state.ell,
                    "K11": state.K.k11,
                    "K22": state.K.k22,
                    "K12": state.K.k12,
                    "Theta11": theta.k11,
                    "Theta22": theta.k22,
                    "Theta12": theta.k12,
                }
            )
            continue
        assert state.tensors is not None
        row: dict[str, float] = {
            "ell": state.ell,
            "K": float(state.K),
            "Theta": float(state.theta),  # type: ignore[arg-type]
        }
        row.update(state.tensors.to_dict())
        rows.append(row)
    return rows


def normalized_rows(trajectory: Trajectory) -> list[dict[str, float]]:
    """Rows for the normalized trajectory CSV."""
    return [s.to_dict() for s in normalize(trajectory)]


def trajectory_columns(trajectory: Trajectory) -> Sequence[str]:
    return PAIR_COLUMNS if trajectory.is_pair else TRAJECTORY_COLUMNS
