"""
Repetition-aware ensemble driver.

Network ``i`` of repetition ``r`` always draws from stream
``r * n_net + i``. Networks are grouped in fixed-size chunks, chunks run on
a thread pool, and the chunk sums are folded in submission order, so the
result is bit-identical for any worker count.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from orthostat.errors import DomainError, EstimationError
from orthostat.recursion import NetworkConfig

from .estimators import ERROR_CONVENTIONS, MC_TENSORS, EnsembleSums, summarize
from .network import simulate_network
from .rng import EnsembleEstimate, RngStream

logger = logging.getLogger(__name__)

MC_COLUMNS: tuple[str, ...] = (
    "tensor",
    "ell",
    "mean",
    "stderr",
    "n_samples",
    "c_w",
    "seed",
)
NTK_COLUMNS: tuple[str, ...] = ("c_w", "ell", "diag_mean", "offdiag_rms")
NORMALIZED_SUFFIX = "_norm"

_DEFAULT_CHUNK_SIZE = 25
_MAX_THREADS = 64


def _get_max_workers() -> int:
    """Worker cap from ORTHOSTAT_THREADS (default min(4, cpu count), 1..64)."""
    default = min(4, os.cpu_count() or 1)
    raw = os.environ.get("ORTHOSTAT_THREADS", "").strip()
    if raw:
        try:
            return min(_MAX_THREADS, max(1, int(raw)))
        except ValueError:
            pass
    return default


@dataclass(frozen=True)
class MonteCarloConfig:
    """Ensemble size, error convention and chunking of a Monte-Carlo run."""

    n_net: int = 200
    n_stats: int = 5
    error_convention: str = "networks"
    exclude_diagonal: bool = False
    chunk_size: int = _DEFAULT_CHUNK_SIZE

    def __post_init__(self) -> None:
        if self.n_net < 2 or self.n_stats < 2:
            raise EstimationError(
                f"Error bars need n_net >= 2 and n_stats >= 2, "
                f"got n_net={self.n_net} n_stats={self.n_stats}"
            )
        if self.error_convention not in ERROR_CONVENTIONS:
            raise DomainError(
                f"Unknown error convention {self.error_convention!r}; "
                f"expected one of {ERROR_CONVENTIONS}"
            )
        if self.chunk_size < 1:
            raise DomainError(f"chunk_size must be >= 1, got {self.chunk_size}")


@dataclass
class EnsembleResult:
    """Per-layer estimates of one ensemble run."""

    network: NetworkConfig
    mc: MonteCarloConfig
    seed: int
    estimates: dict[str, list[EnsembleEstimate]]
    normalized: dict[str, list[EnsembleEstimate]]
    theta_bar: np.ndarray | None = field(default=None, repr=False)

    def estimate(self, name: str, ell: int) -> EnsembleEstimate:
        """Raw estimate of ``name`` (K, Theta, V4, D, F, A, B) at layer ``ell``."""
        return self.estimates[name][ell - 1]

    def normalized_estimate(self, name: str, ell: int) -> EnsembleEstimate:
        """Normalized estimate of ``name`` (V4, D, F, A, B) at layer ``ell``."""
        return self.normalized[name][ell - 1]

    def rows(self) -> list[dict[str, Any]]:
        """CSV rows: raw estimates, then normalized ones with a ``_norm`` suffix."""
        out: list[dict[str, Any]] = []
        blocks = [(name, est) for name, est in self.estimates.items()]
        blocks += [
            (name + NORMALIZED_SUFFIX, self.normalized[name]) for name in MC_TENSORS
        ]
        for name, per_layer in blocks:
            for ell, e in enumerate(per_layer, start=1):
                out.append(
                    {
                        "tensor": name,
                        "ell": ell,
                        "mean": e.mean,
                        "stderr": e.stderr,
                        "n_samples": e.n_samples,
                        "c_w": self.network.c_w,
                        "seed": self.seed,
                    }
                )
        return out

    def ntk_rows(self) -> list[dict[str, Any]]:
        """
        Per-layer summary of the ensemble-mean NTK matrix.

        At infinite width the mean NTK is Theta times the identity, so
        ``offdiag_rms`` measures the finite-width departure from that shape.
        """
        if self.theta_bar is None:
            return []
        out: list[dict[str, Any]] = []
        n = self.theta_bar.shape[-1]
        for ell, mat in enumerate(self.theta_bar, start=1):
            diag = np.diagonal(mat)
            off = mat - np.diag(diag)
            out.append(
                {
                    "c_w": self.network.c_w,
                    "ell": ell,
                    "diag_mean": float(diag.mean()),
                    "offdiag_rms": float(np.sqrt(np.sum(off**2) / (n * (n - 1)))),
                }
            )
        return out


def _simulate_chunk(
    x: np.ndarray, cfg: NetworkConfig, seed: int, stream_ids: Sequence[int]
) -> EnsembleSums:
    sums = EnsembleSums(cfg.n, cfg.depth)
    for stream_id in stream_ids:
        sums.add(simulate_network(x, cfg, RngStream(seed, stream_id)))
    return sums


def run_ensemble(
    x: Any,
    cfg: NetworkConfig,
    mc: MonteCarloConfig,
    seed: int,
    max_workers: int | None = None,
) -> EnsembleResult:
    """
    Simulate ``n_stats`` repetitions of ``n_net`` networks and estimate tensors.

    Args:
        x: Single input vector of length cfg.n.
        cfg: Network configuration (width, depth, C_W, schedules, ensemble).
        mc: Ensemble sizes and error convention.
        seed: Root seed; every network gets its own stream.
        max_workers: Thread cap, defaults to ORTHOSTAT_THREADS.

    Returns:
        EnsembleResult with raw and normalized per-layer estimates.

    Raises:
        DomainError: If x is not a single vector of length cfg.n.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (cfg.n,):
        raise DomainError(
            f"Monte-Carlo input must have shape ({cfg.n},), got {x.shape}"
        )
    workers = max_workers if max_workers is not None else _get_max_workers()

    plan: list[tuple[int, list[int]]] = []
    for rep in range(mc.n_stats):
        base = rep * mc.n_net
        for start in range(0, mc.n_net, mc.chunk_size):
            stop = min(start + mc.chunk_size, mc.n_net)
            plan.append((rep, [base + i for i in range(start, stop)]))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            (rep, pool.submit(_simulate_chunk, x, cfg, seed, ids))
            for rep, ids in plan
        ]
        repetitions = [EnsembleSums(cfg.n, cfg.depth) for _ in range(mc.n_stats)]
        for rep, future in futures:
            repetitions[rep].merge(future.result())

    for rep, sums in enumerate(repetitions):
        logger.info("stream_fold: repetition=%d networks=%d", rep, sums.count)

    raw, normalized = summarize(repetitions, mc.error_convention, mc.exclude_diagonal)
    theta_bar = np.mean([r.theta_bar() for r in repetitions], axis=0)
    return EnsembleResult(cfg, mc, seed, raw, normalized, theta_bar)


def sweep_cw(
    values: Sequence[float],
    x: Any,
    cfg: NetworkConfig,
    mc: MonteCarloConfig,
    seed: int,
    max_workers: int | None = None,
) -> dict[float, EnsembleResult]:
    """One ensemble run per C_W, all on the same seed and stream plan."""
    return {
        float(c_w): run_ensemble(x, replace(cfg, c_w=float(c_w)), mc, seed, max_workers)
        for c_w in values
    }
