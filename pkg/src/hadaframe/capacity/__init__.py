"""Monte-Carlo NOMA capacity of random subframes."""

from hadaframe.capacity.montecarlo import (
    TRIAL_BATCH,
    ZERO_EIGEN_TOL,
    CapacityConfig,
    CapacityEstimate,
    IidMode,
    capacity,
    db_to_linear,
    gram_eigenvalues,
    monte_carlo,
    practical_capacity,
    sample_subframe,
    trial_rng,
)

__all__ = [
    "TRIAL_BATCH",
    "ZERO_EIGEN_TOL",
    "CapacityConfig",
    "CapacityEstimate",
    "IidMode",
    "capacity",
    "db_to_linear",
    "gram_eigenvalues",
    "monte_carlo",
    "practical_capacity",
    "sample_subframe",
    "trial_rng",
]
