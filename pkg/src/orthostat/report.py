"""CSV emission and the recursion / expansion / Monte-Carlo comparison report."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Sequence

import pyarrow as pa  # type: ignore[import-untyped]
import pyarrow.csv as pacsv  # type: ignore[import-untyped]

from orthostat.asymptotics import (
    INCONSISTENT_TABLES,
    ExpansionTable,
    calibrate_constants,
    calibrated_tables,
    load_bundled_tables,
    residual_value,
    tables_by_name,
)
from orthostat.errors import CalibrationError
from orthostat.montecarlo import EnsembleResult
from orthostat.recursion import TENSOR_NAMES, NetworkConfig, Trajectory

logger = logging.getLogger(__name__)

COMPARE_COLUMNS: tuple[str, ...] = (
    "tensor",
    "ell",
    "recursion",
    "expansion",
    "mc_mean",
    "mc_stderr",
    "z_score",
    "rel_residual",
    "flags",
)
EXPANSION_COLUMNS: tuple[str, ...] = ("ell", "value")
COMPARE_TENSORS: tuple[str, ...] = ("K", "Theta", *TENSOR_NAMES)
CALIBRATED = ("K", "Theta", "V4")

# Layer-1 K within this of the bundled calibration point counts as "the same run".
_CALIBRATION_POINT_RTOL = 1e-4


def _column(values: list[Any]) -> pa.Array:
    if all(v is None for v in values):
        return pa.array(values, type=pa.float64())
    return pa.array(values)


def _rows_to_table(
    rows: Sequence[dict[str, Any]], columns: Sequence[str]
) -> pa.Table:
    """Build a pyarrow table with a fixed column order; missing cells become null."""
    return pa.table({col: _column([r.get(col) for r in rows]) for col in columns})


def write_csv(
    rows: Sequence[dict[str, Any]], columns: Sequence[str], path: Path
) -> Path:
    """
    Write rows as CSV with the given column order.

    Nulls are written as empty cells. The parent directory is created.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = _rows_to_table(rows, columns)
    options = pacsv.WriteOptions(quoting_style="none")
    pacsv.write_csv(table, path, write_options=options)
    return path


def expansion_rows(table: ExpansionTable, ells: Sequence[int]) -> list[dict[str, Any]]:
    return [{"ell": ell, "value": float(table.evaluate(ell))} for ell in ells]


def comparison_tables(
    trajectory: Trajectory, cfg: NetworkConfig
) -> tuple[dict[str, ExpansionTable], dict[str, bool]]:
    """
    Expansion tables for a run, with a per-tensor ``bundled_constants`` marker.

    Empty unless the network is the critical default configuration. K, Theta
    and V4 are calibrated from the run's own layer-1 values; the rest use
    the bundled tables, marked when the run is not at their calibration point.
    """
    if not cfg.is_critical_default or trajectory.is_pair:
        return {}, {}
    bundled = tables_by_name(load_bundled_tables())
    first = trajectory.at(1)
    k1 = float(first.K)  # type: ignore[arg-type]
    at_calibration_point = (
        abs(k1 / bundled["K"].evaluate(1.0) - 1.0) < _CALIBRATION_POINT_RTOL
    )
    marker = {name: not at_calibration_point for name in bundled}
    tables = dict(bundled)
    try:
        assert first.tensors is not None
        constants = calibrate_constants(
            k1, float(first.theta), first.tensors.V4  # type: ignore[arg-type]
        )
    except CalibrationError as e:
        logger.warning("compare_calibration: fallback_to_bundled_constants %s", e)
        return tables, marker
    tables.update(calibrated_tables(constants))
    marker.update({name: False for name in CALIBRATED})
    return tables, marker


def compare_rows(
    trajectory: Trajectory,
    tables: dict[str, ExpansionTable],
    mc: EnsembleResult | None,
    bundled_constants: dict[str, bool] | None = None,
) -> list[dict[str, Any]]:
    """
    One row per (tensor, ell) joining recursion, expansion and Monte Carlo.

    z_score = (mc_mean - recursion) / mc_stderr, left empty when the error
    is zero. rel_residual compares recursion and expansion.
    """
    bundled_constants = bundled_constants or {}
    rows: list[dict[str, Any]] = []
    for name in COMPARE_TENSORS:
        values = trajectory.column(name)
        table = tables.get(name)
        mc_est = None if mc is None else mc.estimates.get(name)
        for state, rec in zip(trajectory, values):
            flags: list[str] = []
            row: dict[str, Any] = {"tensor": name, "ell": state.ell}
            row["recursion"] = float(rec)
            if table is None:
                flags.append("no_expansion")
            else:
                exp = float(table.evaluate(state.ell))
                res, relative = residual_value(float(rec), exp)
                row["expansion"] = exp
                row["rel_residual"] = res
                if not relative:
                    flags.append("absolute_residual")
                if bundled_constants.get(name):
                    flags.append("bundled_constants")
                if name in INCONSISTENT_TABLES:
                    flags.append("inconsistent_table")
            if mc_est is None:
                flags.append("no_mc")
            else:
                e = mc_est[state.ell - 1]
                row["mc_mean"] = e.mean
                row["mc_stderr"] = e.stderr
                if e.stderr > 0:
                    row["z_score"] = (e.mean - float(rec)) / e.stderr
            row["flags"] = ";".join(flags)
            rows.append(row)
    return rows
