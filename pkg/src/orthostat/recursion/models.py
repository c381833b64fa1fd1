"""Data models for the layer-to-layer recursions."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Iterator

import numpy as np

from orthostat.errors import ConfigurationError, DomainError
from orthostat.gauss_expect import Kernel2

ENSEMBLES = ("orthogonal", "gaussian")

TENSOR_NAMES: tuple[str, ...] = (
    "V4",
    "D",
    "F",
    "A",
    "B",
    "P",
    "Q",
    "R",
    "S",
    "T",
    "U",
    "V6",
)


@dataclass(frozen=True)
class Schedule:
    """Per-layer learning-rate factor: constant, or ``coefficient / ell``."""

    coefficient: float = 1.0
    inverse: bool = False

    def __call__(self, ell: int) -> float:
        if self.inverse:
            return self.coefficient / ell
        return self.coefficient

    def __str__(self) -> str:
        value = f"{self.coefficient:g}"
        return f"{value}/ell" if self.inverse else value


def parse_schedule(value: Any) -> Schedule:
    """
    Parse a schedule from config: a number, ``"1/ell"`` or ``"<c>/ell"``.

    Raises:
        ConfigurationError: If the value is neither form.
    """
    if isinstance(value, Schedule):
        return value
    if isinstance(value, bool):
        raise ConfigurationError(f"Invalid schedule: {value!r}")
    if isinstance(value, (int, float)):
        return Schedule(float(value), inverse=False)
    if isinstance(value, str):
        text = value.replace(" ", "")
        try:
            if text.endswith("/ell"):
                return Schedule(float(text[: -len("/ell")]), inverse=True)
            return Schedule(float(text), inverse=False)
        except ValueError:
            pass
    raise ConfigurationError(
        f"Invalid schedule {value!r}; use a number or '<c>/ell' (e.g. '1/ell')"
    )


@dataclass(frozen=True)
class NetworkConfig:
    """Equal-width tanh MLP hyperparameters."""

    n: int
    depth: int
    c_w: float = 1.0
    lambda_b: Schedule = Schedule(1.0, inverse=True)
    lambda_w: Schedule = Schedule(1.0, inverse=False)
    ensemble: str = "orthogonal"

    def __post_init__(self) -> None:
        if self.n < 3:
            raise DomainError(f"Width n must be >= 3, got {self.n}")
        if self.depth < 1:
            raise DomainError(f"Depth must be >= 1, got {self.depth}")
        if not self.c_w > 0:
            raise DomainError(f"c_w must be positive, got {self.c_w!r}")
        if self.ensemble not in ENSEMBLES:
            raise DomainError(
                f"Unknown ensemble {self.ensemble!r}; expected one of {ENSEMBLES}"
            )

    @property
    def is_orthogonal(self) -> bool:
        return self.ensemble == "orthogonal"

    @property
    def is_critical_default(self) -> bool:
        """C_W = 1 with lambda_b = 1/ell, lambda_W = 1 and orthogonal weights."""
        return (
            self.c_w == 1.0
            and self.lambda_b == Schedule(1.0, inverse=True)
            and self.lambda_w == Schedule(1.0, inverse=False)
            and self.is_orthogonal
        )


@dataclass(frozen=True)
class TensorRecord:
    """Single-input finite-width tensors at one layer."""

    V4: float = 0.0
    D: float = 0.0
    F: float = 0.0
    A: float = 0.0
    B: float = 0.0
    P: float = 0.0
    Q: float = 0.0
    R: float = 0.0
    S: float = 0.0
    T: float = 0.0
    U: float = 0.0
    V6: float = 0.0

    def to_dict(self) -> dict[str, float]:
        """Convert to dictionary."""
        return asdict(self)


@dataclass(frozen=True)
class LayerState:
    """Kernel, NTK and (single-input) tensors at layer ``ell``."""

    ell: int
    K: float | Kernel2
    theta: float | Kernel2
    tensors: TensorRecord | None = None

    @property
    def is_pair(self) -> bool:
        return isinstance(self.K, Kernel2)


@dataclass(frozen=True)
class NormalizedState:
    """Dimensionless tensors: D/(K Theta), A/Theta^2, R K/Theta^3, V4/K^2, ..."""

    ell: int
    V4: float
    D: float
    F: float
    A: float
    B: float
    P: float
    Q: float
    R: float
    S: float
    T: float
    U: float
    V6: float

    def to_dict(self) -> dict[str, float]:
        """Convert to dictionary."""
        return asdict(self)


@dataclass
class Trajectory:
    """Layer states from ell = 1 to ell = L."""

    states: list[LayerState]

    def __post_init__(self) -> None:
        for prev, cur in zip(self.states, self.states[1:]):
            if cur.ell != prev.ell + 1:
                raise DomainError(
                    f"Trajectory layers must increase by one: {prev.ell} -> {cur.ell}"
                )

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[LayerState]:
        return iter(self.states)

    def __getitem__(self, index: int) -> LayerState:
        return self.states[index]

    @property
    def is_pair(self) -> bool:
        return bool(self.states) and self.states[0].is_pair

    def at(self, ell: int) -> LayerState:
        """State at layer ``ell`` (1-based)."""
        return self.states[ell - self.states[0].ell]

    def column(self, name: str) -> np.ndarray:
        """Per-layer values of ``K``, ``Theta`` or a tensor (single-input only)."""
        if self.is_pair:
            raise DomainError("column() is defined for single-input trajectories")
        if name == "K":
            return np.array([float(s.K) for s in self.states])  # type: ignore[arg-type]
        if name == "Theta":
            return np.array(
                [float(s.theta) for s in self.states]  # type: ignore[arg-type]
            )
        if name not in {f.name for f in fields(TensorRecord)}:
            raise DomainError(f"Unknown tensor {name!r}")
        return np.array([getattr(s.tensors, name) for s in self.states])
