"""
Weight sampling: Haar-orthogonal matrices (QR with sign correction) and
i.i.d. Gaussian matrices, plus a Monte-Carlo oracle for Haar moments.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from orthostat.errors import DomainError

from .rng import EnsembleEstimate, RngStream, as_generator

logger = logging.getLogger(__name__)

# |R_ii| below this (relative to sqrt(n)) counts as rank deficient.
RANK_TOL = 1e-10
ORACLE_BATCH_FLOATS = 2_000_000


def _check(n: int, c_w: float) -> None:
    if n < 2:
        raise DomainError(f"Matrix size must be >= 2, got {n}")
    if not c_w > 0:
        raise DomainError(f"c_w must be positive, got {c_w!r}")


def _sign_corrected_q(q: np.ndarray, r: np.ndarray) -> np.ndarray:
    # Fix the column signs so that diag(R) > 0; plain QR is not Haar.
    sign = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    sign[sign == 0] = 1
    return q * sign[..., np.newaxis, :]


def sample_orthogonal(
    n: int, c_w: float, rng: RngStream | np.random.Generator
) -> np.ndarray:
    """
    Draw sqrt(C_W) * O with O Haar-distributed on O(n).

    A rank-deficient Gaussian draw is discarded and redrawn.
    """
    _check(n, c_w)
    gen = as_generator(rng)
    while True:
        h = gen.standard_normal((n, n))
        q, r = np.linalg.qr(h)
        min_diag = float(np.min(np.abs(np.diag(r))))
        if min_diag > RANK_TOL * math.sqrt(n):
            break
        logger.warning("orthogonal_resample: n=%d min_diag=%r", n, min_diag)
    return _sign_corrected_q(q, r) * math.sqrt(c_w)


def sample_gaussian(
    n: int, c_w: float, rng: RngStream | np.random.Generator
) -> np.ndarray:
    """Draw an n x n matrix with i.i.d. N(0, C_W/n) entries."""
    _check(n, c_w)
    return as_generator(rng).normal(0.0, math.sqrt(c_w / n), size=(n, n))


def sample_orthogonal_batch(
    n: int, c_w: float, count: int, rng: RngStream | np.random.Generator
) -> np.ndarray:
    """``count`` independent Haar draws stacked as (count, n, n)."""
    _check(n, c_w)
    if count < 1:
        raise DomainError(f"Batch size must be >= 1, got {count}")
    gen = as_generator(rng)
    h = gen.standard_normal((count, n, n))
    q, r = np.linalg.qr(h)
    q = _sign_corrected_q(q, r)
    min_diag = np.min(np.abs(np.diagonal(r, axis1=-2, axis2=-1)), axis=-1)
    for idx in np.flatnonzero(min_diag <= RANK_TOL * math.sqrt(n)):
        logger.warning(
            "orthogonal_resample: n=%d min_diag=%r", n, float(min_diag[idx])
        )
        q[idx] = sample_orthogonal(n, 1.0, gen)
    return q * math.sqrt(c_w)


def haar_moment_oracle(
    n: int,
    c_w: float,
    row_indices: Sequence[int],
    col_indices: Sequence[int],
    n_samples: int,
    seed: int,
) -> EnsembleEstimate:
    """
    Monte-Carlo estimate of E[W_{i1 j1} ... W_{i2k j2k}] for W = sqrt(C_W) O.

    Indices are 1-based, as in ``orthogonal_moment``.

    Raises:
        DomainError: On mismatched or out-of-range indices.
        EstimationError: If n_samples < 2.
    """
    _check(n, c_w)
    if len(row_indices) != len(col_indices):
        raise DomainError(
            f"Row and column index lists differ in length: "
            f"{len(row_indices)} vs {len(col_indices)}"
        )
    for idx in (*row_indices, *col_indices):
        if not 1 <= idx <= n:
            raise DomainError(f"Index {idx} out of range 1..{n}")
    rows = np.asarray(row_indices, dtype=int) - 1
    cols = np.asarray(col_indices, dtype=int) - 1

    gen = RngStream(seed).generator()
    batch = max(1, min(n_samples, ORACLE_BATCH_FLOATS // (n * n)))
    values: list[np.ndarray] = []
    remaining = n_samples
    while remaining > 0:
        size = min(batch, remaining)
        w = sample_orthogonal_batch(n, c_w, size, gen)
        values.append(np.prod(w[:, rows, cols], axis=-1))
        remaining -= size
    return EnsembleEstimate.from_samples(
        np.concatenate(values) if values else np.empty(0)
    )
