"""Deterministic layer-wise recursions for the kernel, the NTK and the 1/n tensors."""

from .engine import (
    NORMALIZED_COLUMNS,
    PAIR_COLUMNS,
    TRAJECTORY_COLUMNS,
    init_from_input,
    normalize,
    normalized_rows,
    run,
    step_kernel,
    step_ntk,
    step_tensors_single,
    trajectory_columns,
    trajectory_rows,
)
from .models import (
    TENSOR_NAMES,
    LayerState,
    NetworkConfig,
    NormalizedState,
    Schedule,
    TensorRecord,
    Trajectory,
    parse_schedule,
)

__all__ = [
    "LayerState",
    "NORMALIZED_COLUMNS",
    "NetworkConfig",
    "NormalizedState",
    "PAIR_COLUMNS",
    "Schedule",
    "TENSOR_NAMES",
    "TRAJECTORY_COLUMNS",
    "TensorRecord",
    "Trajectory",
    "init_from_input",
    "normalize",
    "normalized_rows",
    "parse_schedule",
    "run",
    "step_kernel",
    "step_ntk",
    "step_tensors_single",
    "trajectory_columns",
    "trajectory_rows",
]
