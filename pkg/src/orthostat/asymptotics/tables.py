"""
Large-depth series O(ell) = ell^(-p) * sum_ij c_ij log^j(ell) / ell^i.

The coefficient tables ship as ``large_depth_tables.csv`` (one row per
tensor, i, j) with the printed values kept verbatim, fractions included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pyarrow as pa  # type: ignore[import-untyped]
import pyarrow.csv as pacsv  # type: ignore[import-untyped]

from orthostat.errors import ConfigurationError, DomainError

_DATA_DIR = Path(__file__).parent
TABLES_PATH = _DATA_DIR / "large_depth_tables.csv"
CONSTANTS_PATH = _DATA_DIR / "large_depth_constants.csv"

TABLE_COLUMNS = ("tensor", "p", "i", "j", "coefficient")
CONSTANT_COLUMNS = ("tensor", "name", "value")
MAX_INDEX = 5

# Decay exponent per tensor: O ~ ell^(-p).
EXPONENTS: dict[str, int] = {
    "K": 1,
    "V4": 2,
    "Theta": 0,
    "D": 2,
    "F": 1,
    "A": 1,
    "B": 1,
    "P": 0,
    "Q": 0,
    "R": -1,
    "S": -1,
    "T": -1,
    "U": 0,
    "V6": 3,
}

# Tables whose leading terms disagree with the Q and T recursions: the recursion
# gives Q -> -5/12 (table -17/12) and T/ell -> 0.558 (table 1.889).
INCONSISTENT_TABLES: frozenset[str] = frozenset({"Q", "T"})


@dataclass(frozen=True)
class ExpansionTable:
    """Exponent and coefficient grid of one tensor's large-depth series."""

    tensor_name: str
    p: int
    coeffs: dict[tuple[int, int], float]
    free_constants: dict[str, float] = field(default_factory=dict)

    def coefficient(self, i: int, j: int) -> float:
        """c_ij, zero when absent from the table."""
        return self.coeffs.get((i, j), 0.0)

    def evaluate(self, ell: float | np.ndarray) -> float | np.ndarray:
        """Series value at depth ``ell`` (scalar or array, all >= 1)."""
        ells = np.asarray(ell, dtype=float)
        if np.any(ells < 1):
            raise DomainError(f"Expansion needs ell >= 1, got {ell!r}")
        log_ell = np.log(ells)
        total = np.zeros_like(ells)
        for (i, j), c in self.coeffs.items():
            total = total + c * log_ell**j / ells**i
        value = total * ells ** (-float(self.p))
        return float(value) if value.ndim == 0 else value


def eval_expansion(table: ExpansionTable, ell: float) -> float:
    """
    Evaluate ``table`` at a single depth.

    Raises:
        DomainError: If ell < 1.
    """
    return float(table.evaluate(float(ell)))


def expansion_series(table: ExpansionTable, ells: Sequence[float]) -> np.ndarray:
    """Evaluate ``table`` at several depths."""
    return np.atleast_1d(table.evaluate(np.asarray(ells, dtype=float)))


def read_string_rows(
    path: Union[str, Path], columns: Sequence[str]
) -> list[dict[str, str]]:
    """
    Read a bundled CSV with every column kept as text.

    Raises:
        ConfigurationError: If the file is missing, unreadable or has other columns.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Data file not found: {path}")
    try:
        table = pacsv.read_csv(
            path,
            convert_options=pacsv.ConvertOptions(
                column_types={name: pa.string() for name in columns}
            ),
        )
    except (pa.ArrowInvalid, OSError) as e:
        raise ConfigurationError(f"Malformed data file {path}: {e}") from e
    if tuple(table.column_names) != tuple(columns):
        raise ConfigurationError(
            f"Data file {path} has columns {table.column_names}, "
            f"expected {list(columns)}"
        )
    return table.to_pylist()


def _parse_number(text: str | None, path: Path) -> float:
    try:
        return float(Fraction((text or "").strip()))
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigurationError(f"Bad number {text!r} in {path}") from e


def load_bundled_constants(
    path: Union[str, Path, None] = None,
) -> dict[str, dict[str, float]]:
    """Free constants (log ell_0, c_ij fixed by initial conditions) per tensor."""
    path = Path(path) if path is not None else CONSTANTS_PATH
    out: dict[str, dict[str, float]] = {}
    for row in read_string_rows(path, CONSTANT_COLUMNS):
        out.setdefault(row["tensor"], {})[row["name"]] = _parse_number(
            row["value"], path
        )
    return out


def load_bundled_tables(
    path: Union[str, Path, None] = None,
    constants_path: Union[str, Path, None] = None,
) -> list[ExpansionTable]:
    """
    Load the bundled large-depth coefficient tables.

    Returns:
        One ExpansionTable per tensor, in file order.

    Raises:
        ConfigurationError: On a missing or malformed data file.
    """
    path = Path(path) if path is not None else TABLES_PATH
    constants = load_bundled_constants(constants_path)
    exponents: dict[str, int] = {}
    grids: dict[str, dict[tuple[int, int], float]] = {}
    for row in read_string_rows(path, TABLE_COLUMNS):
        name = (row["tensor"] or "").strip()
        try:
            p, i, j = (int(row[k]) for k in ("p", "i", "j"))  # type: ignore[arg-type]
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Bad index in {path}: {row!r}") from e
        if not (0 <= i <= MAX_INDEX and 0 <= j <= MAX_INDEX):
            raise ConfigurationError(f"Index out of range in {path}: {row!r}")
        if exponents.setdefault(name, p) != p:
            raise ConfigurationError(f"Tensor {name} has two exponents in {path}")
        grid = grids.setdefault(name, {})
        if (i, j) in grid:
            raise ConfigurationError(f"Duplicate entry {name} ({i},{j}) in {path}")
        grid[(i, j)] = _parse_number(row["coefficient"], path)
    return [
        ExpansionTable(
            tensor_name=name,
            p=exponents[name],
            coeffs=grid,
            free_constants=dict(constants.get(name, {})),
        )
        for name, grid in grids.items()
    ]


def tables_by_name(tables: Sequence[ExpansionTable]) -> dict[str, ExpansionTable]:
    return {t.tensor_name: t for t in tables}
