"""
Parametric large-depth families for K, Theta and V4 and their calibration.

The families carry the free constants symbolically (log ell_0, c^Theta_{1,0},
c^V_{2,0}); the constants are fixed by matching the series at ell = 1 to the
layer-1 values, where every log term vanishes.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

from scipy.optimize import bisect  # type: ignore[import-untyped]

from orthostat.errors import CalibrationError

from .tables import EXPONENTS, ExpansionTable, tables_by_name

logger = logging.getLogger(__name__)

CALIBRATION_XTOL = 1e-12
LOG_ELL0_BRACKET = (-5.0, -1.0)
LINEAR_BRACKET = (-50.0, 50.0)
CROSS_CHECK_RTOL = 1e-4


@dataclass(frozen=True)
class CalibratedConstants:
    """Free constants of the K, Theta and V4 series."""

    log_ell0: float
    c_theta_10: float
    c_v_20: float

    def to_dict(self) -> dict[str, float]:
        """Convert to dictionary."""
        return asdict(self)


@dataclass(frozen=True)
class TableMismatch:
    """One coefficient where the bundled table and the family disagree."""

    tensor: str
    i: int
    j: int
    table: float
    family: float

    @property
    def relative(self) -> float:
        scale = max(abs(self.table), abs(self.family))
        return abs(self.table - self.family) / scale if scale else 0.0


def kernel_coeffs(log_ell0: float) -> dict[tuple[int, int], float]:
    """K coefficients as functions of log ell_0."""
    a = log_ell0
    return {
        (0, 0): 1 / 2,
        (1, 0): -5 * a / 24,
        (1, 1): 5 / 24,
        (2, 0): (53 + 25 * a + 25 * a**2) / 288,
        (2, 1): 5 * (-5 - 10 * a) / 288,
        (2, 2): 25 / 288,
        (3, 0): (-8597 - 9200 * a - 3125 * a**2 - 1250 * a**3) / 34560,
        (3, 1): 5 * (23 + 125 / 8 * a + 75 / 8 * a**2) / 432,
        (3, 2): 25 * (-25 - 30 * a) / 6912,
        (3, 3): 125 / 3456,
        (4, 0): (
            -2479663 + 653820 * a + 322875 * a**2 + 81250 * a**3 + 18750 * a**4
        )
        / 1244160,
        (4, 1): (-10897 - 21525 / 2 * a - 8125 / 2 * a**2 - 1250 * a**3) / 20736,
        (4, 2): 25 * (287 + 650 / 3 * a + 100 * a**2) / 27648,
        (4, 3): 125 * (-65 - 60 * a) / 124416,
        (4, 4): 625 / 41472,
    }


def ntk_coeffs(log_ell0: float, c: float) -> dict[tuple[int, int], float]:
    """Theta coefficients as functions of log ell_0 and c^Theta_{1,0}."""
    a = log_ell0
    return {
        (0, 0): 3 / 2,
        (1, 0): c,
        (1, 1): (27 + 10 * a) / 24,
        (1, 2): -5 / 24,
        (2, 0): (447 + 205 * a) / 288 - (4 + 5 * a) * c / 12,
        (2, 1): (-313 - 175 * a - 50 * a**2) / 288 + 5 * c / 12,
        (2, 2): 5 * (31 + 15 * a) / 288,
        (2, 3): -25 / 288,
        (3, 0): (-183829 - 116850 * a - 26500 * a**2) / 69120
        + (99 + 65 * a + 25 * a**2) * c / 144,
        (3, 1): (17031 + 10790 * a + 2650 * a**2 + 500 * a**3) / 6912
        - 5 * (13 + 10 * a) * c / 144,
        (3, 2): -25 * (143 + 93 * a + 25 * a**2) / 3456 + 25 * c / 144,
        (3, 3): 125 * (2 + a) / 864,
        (3, 4): -125 / 3456,
        (4, 0): (
            287109682 + 282873525 * a + 85689000 * a**2 + 12240000 * a**3
        )
        / 67184640
        - (21949 + 18100 * a + 6125 * a**2 + 1250 * a**3) * c / 17280,
        (4, 1): (
            -126292817
            - 95368260 * a
            - 30944250 * a**2
            - 5130000 * a**3
            - 675000 * a**4
        )
        / 22394880
        + 5 * (362 + 245 * a + 75 * a**2) * c / 1728,
        (4, 2): (2029301 + 1492050 * a + 457875 * a**2 + 78750 * a**3) / 746496
        - 25 * (49 + 30 * a) * c / 3456,
        (4, 3): -25 * (23863 + 16110 * a + 4050 * a**2) / 746496 + 125 * c / 1728,
        (4, 4): 125 * (103 + 50 * a) / 82944,
        (4, 5): -625 / 41472,
    }


def vertex_coeffs(log_ell0: float, c: float) -> dict[tuple[int, int], float]:
    """V4 coefficients as functions of log ell_0 and c^V_{2,0}."""
    a = log_ell0
    return {
        (0, 0): -1 / 2,
        (1, 0): (8 + 5 * a) / 12,
        (1, 1): -5 / 12,
        (2, 0): c,
        (2, 1): (-167 + 75 * a) / 144,
        (2, 2): -25 / 96,
    }


def _at_first_layer(coeffs: dict[tuple[int, int], float]) -> float:
    # log(1) = 0 and 1/1^i = 1: only the j = 0 column survives.
    return sum(c for (_, j), c in coeffs.items() if j == 0)


def _solve(
    fn: Callable[[float], float], bracket: tuple[float, float], what: str
) -> float:
    lo, hi = bracket
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise CalibrationError(
            f"No sign change for {what} in bracket [{lo}, {hi}] "
            f"(f={f_lo:.6g}, {f_hi:.6g})"
        )
    return float(bisect(fn, lo, hi, xtol=CALIBRATION_XTOL, maxiter=500))


def calibrate_constants(
    k1: float,
    theta1: float,
    v4_1: float,
    log_ell0_bracket: tuple[float, float] = LOG_ELL0_BRACKET,
    linear_bracket: tuple[float, float] = LINEAR_BRACKET,
) -> CalibratedConstants:
    """
    Fix log ell_0, then c^Theta_{1,0} and c^V_{2,0}, from layer-1 values.

    Each constant is a bracketed bisection so that the series at ell = 1
    reproduces the given value; the Theta and V4 solves use the log ell_0
    found first.

    Raises:
        CalibrationError: If a bracket holds no sign change.
    """
    log_ell0 = _solve(
        lambda a: _at_first_layer(kernel_coeffs(a)) - k1, log_ell0_bracket, "log_ell0"
    )
    c_theta = _solve(
        lambda c: _at_first_layer(ntk_coeffs(log_ell0, c)) - theta1,
        linear_bracket,
        "c_theta_10",
    )
    c_v = _solve(
        lambda c: _at_first_layer(vertex_coeffs(log_ell0, c)) - v4_1,
        linear_bracket,
        "c_v_20",
    )
    return CalibratedConstants(log_ell0=log_ell0, c_theta_10=c_theta, c_v_20=c_v)


def calibrated_tables(constants: CalibratedConstants) -> dict[str, ExpansionTable]:
    """K, Theta and V4 tables with the given constants substituted."""
    a = constants.log_ell0
    return {
        "K": ExpansionTable(
            "K", EXPONENTS["K"], kernel_coeffs(a), {"log_ell0": a}
        ),
        "Theta": ExpansionTable(
            "Theta",
            EXPONENTS["Theta"],
            ntk_coeffs(a, constants.c_theta_10),
            {"log_ell0": a, "c_1_0": constants.c_theta_10},
        ),
        "V4": ExpansionTable(
            "V4",
            EXPONENTS["V4"],
            vertex_coeffs(a, constants.c_v_20),
            {"log_ell0": a, "c_2_0": constants.c_v_20},
        ),
    }


def cross_check_tables(
    constants: CalibratedConstants,
    tables: Sequence[ExpansionTable],
    rtol: float = CROSS_CHECK_RTOL,
) -> list[TableMismatch]:
    """
    Compare the calibrated families against numeric tables.

    Mismatches beyond ``rtol`` are logged and returned; the numeric tables
    stay authoritative.
    """
    by_name = tables_by_name(tables)
    mismatches: list[TableMismatch] = []
    for name, family in calibrated_tables(constants).items():
        table = by_name.get(name)
        if table is None:
            continue
        for i, j in sorted(set(family.coeffs) | set(table.coeffs)):
            m = TableMismatch(
                name, i, j, table.coefficient(i, j), family.coefficient(i, j)
            )
            if m.relative > rtol:
                logger.warning(
                    "table_cross_check: mismatch tensor=%r i=%d j=%d "
                    "table=%r family=%r",
                    name,
                    i,
                    j,
                    m.table,
                    m.family,
                )
                mismatches.append(m)
    return mismatches
