"""Monte-Carlo ensembles of tanh MLPs with orthogonal or Gaussian weights."""

from .ensemble import (
    MC_COLUMNS,
    NORMALIZED_SUFFIX,
    NTK_COLUMNS,
    EnsembleResult,
    MonteCarloConfig,
    run_ensemble,
    sweep_cw,
)
from .estimators import (
    ERROR_CONVENTIONS,
    MC_TENSORS,
    EnsembleSums,
    estimate_tensors,
    normalize_estimates,
    summarize,
)
from .network import (
    MAX_NTK_WIDTH,
    SimState,
    forward,
    ntk_forward,
    sample_weights,
    simulate_network,
)
from .rng import EnsembleEstimate, RngStream, standard_error
from .sampling import (
    haar_moment_oracle,
    sample_gaussian,
    sample_orthogonal,
    sample_orthogonal_batch,
)

__all__ = [
    "ERROR_CONVENTIONS",
    "EnsembleEstimate",
    "EnsembleResult",
    "EnsembleSums",
    "MAX_NTK_WIDTH",
    "MC_COLUMNS",
    "MC_TENSORS",
    "MonteCarloConfig",
    "NORMALIZED_SUFFIX",
    "NTK_COLUMNS",
    "RngStream",
    "SimState",
    "estimate_tensors",
    "forward",
    "haar_moment_oracle",
    "normalize_estimates",
    "ntk_forward",
    "run_ensemble",
    "sample_gaussian",
    "sample_orthogonal",
    "sample_orthogonal_batch",
    "sample_weights",
    "simulate_network",
    "standard_error",
    "summarize",
    "sweep_cw",
]
