"""Large-depth series: bundled coefficient tables, calibration and residuals."""

from .calibration import (
    CalibratedConstants,
    TableMismatch,
    calibrate_constants,
    calibrated_tables,
    cross_check_tables,
    kernel_coeffs,
    ntk_coeffs,
    vertex_coeffs,
)
from .residual import Residual, residual, residual_value
from .tables import (
    CONSTANT_COLUMNS,
    EXPONENTS,
    INCONSISTENT_TABLES,
    TABLE_COLUMNS,
    TABLES_PATH,
    ExpansionTable,
    eval_expansion,
    expansion_series,
    load_bundled_constants,
    load_bundled_tables,
    read_string_rows,
    tables_by_name,
)

__all__ = [
    "CONSTANT_COLUMNS",
    "CalibratedConstants",
    "EXPONENTS",
    "ExpansionTable",
    "INCONSISTENT_TABLES",
    "Residual",
    "TABLES_PATH",
    "TABLE_COLUMNS",
    "TableMismatch",
    "calibrate_constants",
    "calibrated_tables",
    "cross_check_tables",
    "eval_expansion",
    "expansion_series",
    "kernel_coeffs",
    "load_bundled_constants",
    "load_bundled_tables",
    "ntk_coeffs",
    "read_string_rows",
    "residual",
    "residual_value",
    "tables_by_name",
    "vertex_coeffs",
]
