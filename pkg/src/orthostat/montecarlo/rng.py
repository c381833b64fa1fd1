"""Seeded random streams and the error-bar helpers shared by the simulator."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from orthostat.errors import DomainError, EstimationError

MAX_SEED = 2**64


@dataclass(frozen=True)
class RngStream:
    """
    One independent random stream, addressed by ``(seed, stream_id)``.

    Streams are children of a single ``SeedSequence`` keyed by the stream
    id, so distinct ids are statistically independent and the same pair
    always reproduces the same draws.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.seed < MAX_SEED:
            raise DomainError(f"Seed must be a 64-bit unsigned integer: {self.seed}")
        if self.stream_id < 0:
            raise DomainError(f"Stream id must be >= 0, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))

    def select_stream(self, stream_id: int) -> RngStream:
        """Sibling stream with the same seed."""
        return RngStream(self.seed, stream_id)


def as_generator(rng: RngStream | np.random.Generator) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


@dataclass(frozen=True)
class EnsembleEstimate:
    """Mean of a Monte-Carlo quantity with its standard error."""

    mean: float
    stderr: float
    n_samples: int

    @classmethod
    def from_samples(cls, values: Sequence[float] | np.ndarray) -> EnsembleEstimate:
        """
        Mean and standard error of independent samples.

        Raises:
            EstimationError: If fewer than two samples are given.
        """
        x = np.asarray(values, dtype=float)
        stderr = standard_error(x)
        return cls(float(np.mean(x)), stderr, int(x.size))

    def to_dict(self) -> dict[str, float | int]:
        """Convert to dictionary."""
        return asdict(self)


def standard_error(values: Sequence[float] | np.ndarray) -> float:
    """
    Sample standard deviation (ddof=1) over sqrt(n).

    Raises:
        EstimationError: If fewer than two samples are given.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < 2:
        raise EstimationError(
            f"Standard error needs at least 2 samples, got {n}"
        )
    return float(np.std(x, ddof=1) / np.sqrt(n))
