"""Genetic search for generalized difference sets and the GDS cache."""

from hadaframe.search.config import GaConfig
from hadaframe.search.gds import (
    GaResult,
    crossover,
    elitist_replace,
    exhaustive_search,
    fitness,
    init_population,
    mutate,
    population_fitness,
    run_ga,
    select_pairs,
)
from hadaframe.search.cache import (
    CacheIntegrityError,
    GdsCache,
    GdsRecord,
    RecordNotFoundError,
    default_cache_path,
)

__all__ = [
    "GaConfig",
    "GaResult",
    "crossover",
    "elitist_replace",
    "exhaustive_search",
    "fitness",
    "init_population",
    "mutate",
    "population_fitness",
    "run_ga",
    "select_pairs",
    "CacheIntegrityError",
    "GdsCache",
    "GdsRecord",
    "RecordNotFoundError",
    "default_cache_path",
]
