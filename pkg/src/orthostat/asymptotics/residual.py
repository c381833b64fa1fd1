"""Per-layer disagreement between a recursion trajectory and a large-depth series."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from orthostat.recursion import Trajectory

from .tables import ExpansionTable


@dataclass(frozen=True)
class Residual:
    """|recursion - expansion|, divided by |recursion| unless it is zero."""

    ell: int
    recursion: float
    expansion: float
    value: float
    relative: bool = True

    def to_dict(self) -> dict[str, float | int | bool]:
        """Convert to dictionary."""
        return asdict(self)


def residual_value(recursion: float, expansion: float) -> tuple[float, bool]:
    """(residual, is_relative) for one pair of values."""
    diff = abs(recursion - expansion)
    if recursion == 0.0:
        return diff, False
    return diff / abs(recursion), True


def residual(trajectory: Trajectory, table: ExpansionTable) -> list[Residual]:
    """
    Residual of ``table`` against ``trajectory`` at every layer.

    A zero recursion value yields the absolute error with ``relative=False``.
    """
    values = trajectory.column(table.tensor_name)
    out = []
    for state, rec in zip(trajectory, values):
        exp = float(table.evaluate(state.ell))
        value, relative = residual_value(float(rec), exp)
        out.append(Residual(state.ell, float(rec), exp, value, relative))
    return out
