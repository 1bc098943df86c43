"""Genetic search for generalized difference sets.

Individuals are IndexSets (M ones in an N⁺-bit string). Crossover and mutation
preserve the number of ones, and each selected pair is replaced by the two
fittest of {parents, children}, so a pair never gets worse.

Example:
    shape = FrameShape(n_users=16, m_rows=6)
    result = run_ga(shape, GaConfig(rng_seed=3))
    if result.converged:
        print(result.best_set.indices)
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from hadaframe.core.spectra import (
    DifferenceSpectrum,
    TargetSpectrum,
    difference_spectrum,
    gds_target,
)
from hadaframe.core.types import FrameShape, IndexSet
from hadaframe.search.config import GaConfig

logger = logging.getLogger(__name__)

# Floor added to fitness before inverting, so a perfect individual dominates.
SELECTION_EPSILON = 1e-12

# Largest N⁺ accepted by the brute-force oracle.
EXHAUSTIVE_MAX_N_PLUS = 16


@dataclass(frozen=True)
class GaResult:
    """Outcome of a GA run.

    Attributes:
        best_set: Best individual seen over the whole run
        best_fitness: Its fitness (equals the last history entry)
        fitness_history: Best-so-far fitness after each generation
        generations_run: Generations actually evaluated
        converged: True if best_fitness <= success_threshold
    """

    best_set: IndexSet
    best_fitness: float
    fitness_history: List[float] = field(default_factory=list)
    generations_run: int = 0
    converged: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "best_set": list(self.best_set.indices),
            "best_fitness": self.best_fitness,
            "generations_run": self.generations_run,
            "converged": self.converged,
        }


def _weighted_distance(
    residual: npt.NDArray[np.float64], n_minus: int, cfg: GaConfig
) -> npt.NDArray[np.float64]:
    peak = residual[..., n_minus] ** 2
    rest = np.sum(residual**2, axis=-1)
    return np.asarray(cfg.weight_peak * peak + cfg.weight_rest * rest, dtype=np.float64)


def fitness(spectrum: DifferenceSpectrum, target: TargetSpectrum, cfg: GaConfig) -> float:
    """F(λ) = weight_peak (λ[N⁻] - λ*[N⁻])² + weight_rest ||λ - λ*||². Lower is fitter.

    Raises:
        ValueError: If spectrum and target lengths differ
    """
    if spectrum.counts.shape != target.values.shape:
        raise ValueError(
            f"Spectrum length {spectrum.counts.shape[0]} != target length "
            f"{target.values.shape[0]}"
        )
    n_minus = spectrum.counts.shape[0] // 2
    residual = spectrum.counts.astype(np.float64) - target.values
    return float(_weighted_distance(residual, n_minus, cfg))


def population_fitness(
    population: Sequence[IndexSet], target: TargetSpectrum, cfg: GaConfig
) -> npt.NDArray[np.float64]:
    """Fitness of every individual, computed in one batch."""
    if not population:
        return np.zeros(0, dtype=np.float64)
    n_plus = population[0].shape.n_plus
    members = np.stack([s.as_array() for s in population])
    diffs = members[:, :, None] ^ members[:, None, :]
    offsets = (np.arange(len(population)) * n_plus)[:, None, None]
    counts = np.bincount(
        (diffs + offsets).ravel(), minlength=len(population) * n_plus
    ).reshape(len(population), n_plus)
    residual = counts.astype(np.float64) - target.values[None, :]
    return _weighted_distance(residual, n_plus // 2, cfg)


def init_population(
    shape: FrameShape, cfg: GaConfig, rng: np.random.Generator
) -> List[IndexSet]:
    """Uniformly random M-subsets of [0, N⁺).

    Raises:
        ValueError: If M > N⁺
    """
    if shape.m_rows > shape.n_plus:
        raise ValueError(f"Cannot draw {shape.m_rows} distinct indices from {shape.n_plus}")
    return [
        IndexSet.of(rng.choice(shape.n_plus, size=shape.m_rows, replace=False), shape)
        for _ in range(cfg.population_size)
    ]


def select_pairs(
    population: Sequence[IndexSet],
    fitnesses: npt.ArrayLike,
    cfg: GaConfig,
    rng: np.random.Generator,
) -> List[Tuple[IndexSet, IndexSet]]:
    """Draw population_size/2 parent pairs with replacement.

    Individual i is chosen with probability proportional to 1/(fitness_i + ε).
    """
    weights = 1.0 / (np.asarray(fitnesses, dtype=np.float64) + SELECTION_EPSILON)
    probs = weights / weights.sum()
    n_pairs = max(cfg.population_size // 2, 1)
    picks = rng.choice(len(population), size=(n_pairs, 2), replace=True, p=probs)
    return [(population[a], population[b]) for a, b in picks]


def _children_from_permutation(
    merged: npt.ArrayLike, shape: FrameShape
) -> Tuple[IndexSet, IndexSet]:
    """First M and last M entries of an already permuted union."""
    order = np.asarray(merged, dtype=np.int64)
    m = shape.m_rows
    return IndexSet.of(order[:m], shape), IndexSet.of(order[-m:], shape)


def crossover(
    p1: IndexSet, p2: IndexSet, rng: np.random.Generator
) -> Tuple[IndexSet, IndexSet]:
    """Size-preserving crossover: permute the union of the parents' ones, split head/tail."""
    union = np.union1d(p1.as_array(), p2.as_array())
    return _children_from_permutation(rng.permutation(union), p1.shape)


def mutate(s: IndexSet, cfg: GaConfig, rng: np.random.Generator) -> IndexSet:
    """With probability mutation_prob, swap one member for one non-member."""
    shape = s.shape
    if shape.m_rows >= shape.n_plus:
        return s
    if rng.random() >= cfg.mutation_prob:
        return s
    members = s.as_array()
    outside = np.setdiff1d(np.arange(shape.n_plus), members, assume_unique=True)
    drop = rng.choice(members)
    add = rng.choice(outside)
    return IndexSet.of(np.append(members[members != drop], add), shape)


def elitist_replace(
    p1: IndexSet,
    p2: IndexSet,
    c1: IndexSet,
    c2: IndexSet,
    target: TargetSpectrum,
    cfg: GaConfig,
) -> Tuple[IndexSet, IndexSet]:
    """Keep the two fittest of the quartet; children win ties, then input order."""
    quartet = [c1, c2, p1, p2]
    scores = [fitness(difference_spectrum(s), target, cfg) for s in quartet]
    ranked = sorted(range(4), key=lambda i: (scores[i], i))
    return quartet[ranked[0]], quartet[ranked[1]]


def run_ga(
    shape: FrameShape, cfg: GaConfig, target: Optional[TargetSpectrum] = None
) -> GaResult:
    """Search for an IndexSet matching the GDS target.

    Runs init -> (select, crossover, mutate, elitist replace) until
    max_generations or until the best fitness reaches success_threshold.
    All randomness comes from one generator seeded with cfg.rng_seed.
    """
    target = target if target is not None else gds_target(shape)
    rng = np.random.default_rng(cfg.rng_seed)

    logger.debug(
        "GA start: N=%d M=%d N+=%d pop=%d gens=%d seed=%d",
        shape.n_users, shape.m_rows, shape.n_plus,
        cfg.population_size, cfg.max_generations, cfg.rng_seed,
    )

    population = init_population(shape, cfg, rng)
    scores = population_fitness(population, target, cfg)
    best_idx = int(np.argmin(scores))
    best_set, best_fitness = population[best_idx], float(scores[best_idx])

    # An infinite threshold disables the early stop.
    early_stop = not math.isinf(cfg.success_threshold)
    history: List[float] = []
    generations = 0
    while generations < cfg.max_generations:
        if early_stop and best_fitness <= cfg.success_threshold:
            break
        next_population: List[IndexSet] = []
        for p1, p2 in select_pairs(population, scores, cfg, rng):
            if rng.random() < cfg.crossover_prob:
                c1, c2 = crossover(p1, p2, rng)
            else:
                c1, c2 = p1, p2
            c1 = mutate(c1, cfg, rng)
            c2 = mutate(c2, cfg, rng)
            next_population.extend(elitist_replace(p1, p2, c1, c2, target, cfg))

        population = next_population
        scores = population_fitness(population, target, cfg)
        gen_idx = int(np.argmin(scores))
        if scores[gen_idx] < best_fitness:
            best_set, best_fitness = population[gen_idx], float(scores[gen_idx])
        history.append(best_fitness)
        generations += 1

        if generations % 500 == 0:
            logger.debug("GA generation %d: best fitness %.6g", generations, best_fitness)

    converged = best_fitness <= cfg.success_threshold
    logger.debug(
        "GA finished after %d generations: fitness=%.6g converged=%s",
        generations, best_fitness, converged,
    )
    if not history:
        history.append(best_fitness)
    return GaResult(
        best_set=best_set,
        best_fitness=best_fitness,
        fitness_history=history,
        generations_run=generations,
        converged=converged,
    )


def exhaustive_search(
    shape: FrameShape, cfg: Optional[GaConfig] = None, target: Optional[TargetSpectrum] = None
) -> List[Tuple[IndexSet, float]]:
    """Score every M-subset of [0, N⁺); sorted by fitness, then indices.

    Raises:
        ValueError: If N⁺ exceeds EXHAUSTIVE_MAX_N_PLUS
    """
    if shape.n_plus > EXHAUSTIVE_MAX_N_PLUS:
        raise ValueError(
            f"Exhaustive search is limited to N⁺ <= {EXHAUSTIVE_MAX_N_PLUS}, got {shape.n_plus}"
        )
    cfg = cfg or GaConfig()
    target = target if target is not None else gds_target(shape)
    candidates = [
        IndexSet(combo, shape)
        for combo in itertools.combinations(range(shape.n_plus), shape.m_rows)
    ]
    scores = population_fitness(candidates, target, cfg)
    ranked = sorted(zip(candidates, scores.tolist()), key=lambda item: (item[1], item[0].indices))
    return ranked
