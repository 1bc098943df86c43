"""Configuration for the GDS genetic search."""

from pydantic import BaseModel, ConfigDict, Field, field_validator


class GaConfig(BaseModel):
    """Genetic algorithm configuration.

    Attributes:
        population_size: Number of individuals (even, individuals are paired)
        max_generations: Generation budget
        crossover_prob: Probability that a selected pair is recombined
        mutation_prob: Probability that a child receives one paired bit flip
        weight_peak: Fitness weight on the N⁻ spectrum entry
        weight_rest: Fitness weight on the full squared spectrum distance
        rng_seed: Seed of the single per-run generator
        success_threshold: Stop once the best fitness is at or below this value
    """

    model_config = ConfigDict(frozen=True)

    population_size: int = Field(default=100, gt=0)
    max_generations: int = Field(default=2000, gt=0)
    crossover_prob: float = Field(default=0.9, ge=0.0, le=1.0)
    mutation_prob: float = Field(default=0.1, ge=0.0, le=1.0)
    weight_peak: float = Field(default=1.0, ge=0.0)
    weight_rest: float = Field(default=1e-4, ge=0.0)
    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    success_threshold: float = Field(default=1e-9, ge=0.0)

    @field_validator("population_size")
    @classmethod
    def _population_even(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"population_size must be even, got {value}")
        return value
