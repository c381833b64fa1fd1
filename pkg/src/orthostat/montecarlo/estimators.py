"""
Ensemble estimators for K, Theta and the 1/n tensors V4, D, F, A, B.

Networks are reduced into running sums (EnsembleSums), so an ensemble is
never held in memory and chunks computed in parallel fold back in a fixed
order. With q = sum_i z_i^2 and t = tr Theta-hat, the plug-in estimators
per layer are

    K  = <q>/n                       Theta = <t>/n
    V4 = <sum_{i!=j} z_i^2 z_j^2>/(n-1) - n K^2
    D  = (<q t> - <q><t>)/n
    F  = (<z^T Theta-hat z> - tr(<Theta-hat> <z z^T>))/n
    A  = (<t^2> - <t>^2)/n
    B  = (<|Theta-hat|^2> - |<Theta-hat>|^2)/n

where <.> is the ensemble mean and the NTK fluctuation is centred on the
same ensemble. ``exclude_diagonal`` drops the i = j terms of F and B and
uses the 1/(n-1) prefactor instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from orthostat.errors import DomainError, EstimationError

from .network import SimState
from .rng import EnsembleEstimate

MC_TENSORS: tuple[str, ...] = ("V4", "D", "F", "A", "B")
ESTIMATED: tuple[str, ...] = ("K", "Theta", *MC_TENSORS)
ERROR_CONVENTIONS = ("networks", "repetitions")

_LAYER_SCALARS = (
    "q",
    "t",
    "qt",
    "t_sq",
    "offdiag4",
    "theta_fro",
    "theta_diag_sq",
    "ztz",
    "ztz_diag",
)


@dataclass
class EnsembleSums:
    """Running per-layer sums over sampled networks (single input)."""

    n: int
    depth: int
    count: int = 0
    q: np.ndarray = field(init=False)
    t: np.ndarray = field(init=False)
    qt: np.ndarray = field(init=False)
    t_sq: np.ndarray = field(init=False)
    offdiag4: np.ndarray = field(init=False)
    theta: np.ndarray = field(init=False)
    theta_fro: np.ndarray = field(init=False)
    theta_diag_sq: np.ndarray = field(init=False)
    zz: np.ndarray = field(init=False)
    ztz: np.ndarray = field(init=False)
    ztz_diag: np.ndarray = field(init=False)
    k_values: list[np.ndarray] = field(init=False)
    theta_values: list[np.ndarray] = field(init=False)

    def __post_init__(self) -> None:
        L, n = self.depth, self.n
        for name in _LAYER_SCALARS:
            setattr(self, name, np.zeros(L))
        self.theta = np.zeros((L, n, n))
        self.zz = np.zeros((L, n, n))
        self.k_values = []
        self.theta_values = []

    def add(self, state: SimState) -> None:
        """
        Fold one network into the sums.

        Raises:
            DomainError: If the state does not match (n, depth), carries
                several inputs or has no NTK.
        """
        if state.ntk is None:
            raise DomainError("Tensor estimation needs states simulated with the NTK")
        if state.depth != self.depth or state.width != self.n:
            raise DomainError(
                f"State shape (n={state.width}, L={state.depth}) does not match "
                f"(n={self.n}, L={self.depth})"
            )
        if state.z[0].ndim != 1:
            raise DomainError("Tensor estimation is defined for a single input")
        k_row = np.empty(self.depth)
        theta_row = np.empty(self.depth)
        for ell, (z, th) in enumerate(zip(state.z, state.ntk)):
            z_sq = z * z
            q = float(z_sq.sum())
            t = float(np.trace(th))
            diag = np.diagonal(th)
            self.q[ell] += q
            self.t[ell] += t
            self.qt[ell] += q * t
            self.t_sq[ell] += t * t
            self.offdiag4[ell] += q * q - float(z_sq @ z_sq)
            self.theta[ell] += th
            self.theta_fro[ell] += float(np.sum(th * th))
            self.theta_diag_sq[ell] += float(diag @ diag)
            self.zz[ell] += np.outer(z, z)
            self.ztz[ell] += float(z @ th @ z)
            self.ztz_diag[ell] += float(z_sq @ diag)
            k_row[ell] = q / self.n
            theta_row[ell] = t / self.n
        self.k_values.append(k_row)
        self.theta_values.append(theta_row)
        self.count += 1

    def merge(self, other: EnsembleSums) -> None:
        """Append ``other``'s networks after this one's."""
        if (other.n, other.depth) != (self.n, self.depth):
            raise DomainError("Cannot merge sums of different shapes")
        for name in (*_LAYER_SCALARS, "theta", "zz"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.k_values.extend(other.k_values)
        self.theta_values.extend(other.theta_values)
        self.count += other.count

    def estimates(self, exclude_diagonal: bool = False) -> dict[str, np.ndarray]:
        """
        Per-layer plug-in values of K, Theta, V4, D, F, A and B.

        Raises:
            EstimationError: If no network has been added.
        """
        if self.count == 0:
            raise EstimationError("No networks in the ensemble")
        n, N = self.n, self.count
        mean_q = self.q / N
        mean_t = self.t / N
        theta_bar = self.theta / N
        zz_bar = self.zz / N
        K = mean_q / n
        # tr(Theta_bar zz_bar) with both symmetric
        cross = np.einsum("lij,lij->l", theta_bar, zz_bar)
        fro_bar = np.einsum("lij,lij->l", theta_bar, theta_bar)
        if exclude_diagonal:
            theta_diag = np.diagonal(theta_bar, axis1=1, axis2=2)
            zz_diag = np.diagonal(zz_bar, axis1=1, axis2=2)
            F = (
                (self.ztz - self.ztz_diag) / N
                - (cross - np.sum(theta_diag * zz_diag, axis=1))
            ) / (n - 1)
            B = (
                (self.theta_fro - self.theta_diag_sq) / N
                - (fro_bar - np.sum(theta_diag * theta_diag, axis=1))
            ) / (n - 1)
        else:
            F = (self.ztz / N - cross) / n
            B = (self.theta_fro / N - fro_bar) / n
        return {
            "K": K,
            "Theta": mean_t / n,
            "V4": self.offdiag4 / N / (n - 1) - n * K**2,
            "D": (self.qt / N - mean_q * mean_t) / n,
            "F": F,
            "A": (self.t_sq / N - mean_t**2) / n,
            "B": B,
        }

    def theta_bar(self) -> np.ndarray:
        """Ensemble-mean NTK matrix per layer, shape (L, n, n)."""
        return self.theta / self.count


def normalize_estimates(values: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """V4/K^2, D/(K Theta), F/(K Theta), A/Theta^2 and B/Theta^2."""
    K, th = values["K"], values["Theta"]
    return {
        "V4": values["V4"] / K**2,
        "D": values["D"] / (K * th),
        "F": values["F"] / (K * th),
        "A": values["A"] / th**2,
        "B": values["B"] / th**2,
    }


def _per_layer(samples: np.ndarray) -> list[EnsembleEstimate]:
    # samples: (n_samples, L)
    return [
        EnsembleEstimate.from_samples(samples[:, ell])
        for ell in range(samples.shape[1])
    ]


def summarize(
    repetitions: Sequence[EnsembleSums],
    error_convention: str = "networks",
    exclude_diagonal: bool = False,
) -> tuple[dict[str, list[EnsembleEstimate]], dict[str, list[EnsembleEstimate]]]:
    """
    Means and standard errors from per-repetition sums.

    Under ``"networks"`` K and Theta use per-network errors pooled over all
    repetitions; tensors, and everything under ``"repetitions"``, use the
    spread of the per-repetition values.

    Returns:
        (raw, normalized): tensor name -> one estimate per layer.

    Raises:
        DomainError: On an unknown error convention.
        EstimationError: If fewer than two samples back an error bar.
    """
    if error_convention not in ERROR_CONVENTIONS:
        raise DomainError(
            f"Unknown error convention {error_convention!r}; "
            f"expected one of {ERROR_CONVENTIONS}"
        )
    per_rep = [r.estimates(exclude_diagonal) for r in repetitions]
    raw: dict[str, list[EnsembleEstimate]] = {}
    for name in ESTIMATED:
        if error_convention == "networks" and name in ("K", "Theta"):
            attr = "k_values" if name == "K" else "theta_values"
            pooled = np.array([v for r in repetitions for v in getattr(r, attr)])
            raw[name] = _per_layer(pooled)
        else:
            raw[name] = _per_layer(np.array([est[name] for est in per_rep]))
    normed = [normalize_estimates(est) for est in per_rep]
    normalized = {
        name: _per_layer(np.array([est[name] for est in normed]))
        for name in MC_TENSORS
    }
    return raw, normalized


def estimate_tensors(
    ensemble: Sequence[Sequence[SimState]],
    error_convention: str = "networks",
    exclude_diagonal: bool = False,
) -> dict[str, list[EnsembleEstimate]]:
    """
    Estimate K, Theta, V4, D, F, A and B per layer from simulated networks.

    Args:
        ensemble: One sequence of SimState per repetition; all states share
            (n, L) and a single input.
        error_convention: ``"networks"`` or ``"repetitions"``.
        exclude_diagonal: Drop the i = j terms of the F and B sums.

    Returns:
        Tensor name -> list of EnsembleEstimate indexed by ell - 1.

    Raises:
        EstimationError: If a repetition is empty or fewer than two
            samples back an error bar.
    """
    if not ensemble or not ensemble[0]:
        raise EstimationError("Ensemble is empty")
    first = ensemble[0][0]
    sums = []
    for states in ensemble:
        acc = EnsembleSums(first.width, first.depth)
        for state in states:
            acc.add(state)
        sums.append(acc)
    raw, _ = summarize(sums, error_convention, exclude_diagonal)
    return raw
