"""Discrimination distances, bounds and unbiased decompositions for density matrices."""

from .conjecture import (
    ContextualityReport,
    FuzzResult,
    SearchConfig,
    TrialReport,
    contextuality_gap,
    fixed_sigma_feasibility,
    fuzz,
    random_density,
    random_unitary,
    search_unbiased,
)
from .decompose import (
    Decomposition,
    DecompositionPair,
    VerificationReport,
    continuous_swap,
    eigen_decomposition,
    equalize,
    make_pair,
    max_mixed_pair,
    max_weight,
    mix,
    pure_sigma_pair,
    qubit_pair,
    rank2_sigma_pair,
    unbiased_against,
    verify_pair,
)
from .linalg import (
    DensityMatrix,
    PureState,
    Spectrum,
    hermitian_eig,
    maximally_mixed,
    support_inverse,
    validate_density,
)
from .metrics import (
    BoundsReport,
    ClassicalDistribution,
    HelstromMeasurement,
    average_trace_distance,
    bounds,
    classical_variation_distance,
    collision_complement,
    helstrom,
    hs_inner_product,
    simulate_game,
    trace_distance,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsReport",
    "ClassicalDistribution",
    "ContextualityReport",
    "Decomposition",
    "DecompositionPair",
    "DensityMatrix",
    "FuzzResult",
    "HelstromMeasurement",
    "PureState",
    "SearchConfig",
    "Spectrum",
    "TrialReport",
    "VerificationReport",
    "average_trace_distance",
    "bounds",
    "classical_variation_distance",
    "collision_complement",
    "contextuality_gap",
    "continuous_swap",
    "eigen_decomposition",
    "equalize",
    "fixed_sigma_feasibility",
    "fuzz",
    "helstrom",
    "hermitian_eig",
    "hs_inner_product",
    "make_pair",
    "max_mixed_pair",
    "max_weight",
    "maximally_mixed",
    "mix",
    "pure_sigma_pair",
    "qubit_pair",
    "random_density",
    "random_unitary",
    "rank2_sigma_pair",
    "search_unbiased",
    "simulate_game",
    "support_inverse",
    "trace_distance",
    "unbiased_against",
    "validate_density",
    "verify_pair",
]
