"""Tests for the GDS genetic search."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from hadaframe.core.spectra import difference_spectrum, gds_target, is_difference_set
from hadaframe.core.types import FrameShape, IndexSet
from hadaframe.search.config import GaConfig
from hadaframe.search.gds import (
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
from tests.conftest import bent_support


class TestGaConfig:
    """Test GaConfig validation."""

    def test_defaults(self) -> None:
        """Test default values."""
        cfg = GaConfig()
        assert cfg.population_size == 100
        assert cfg.max_generations == 2000
        assert cfg.weight_peak == 1.0
        assert cfg.weight_rest == 1e-4

    def test_odd_population_rejected(self) -> None:
        """Test individuals must pair up."""
        with pytest.raises(ValidationError):
            GaConfig(population_size=7)

    def test_probability_range(self) -> None:
        """Test probabilities outside [0, 1] raise."""
        with pytest.raises(ValidationError):
            GaConfig(crossover_prob=1.5)
        with pytest.raises(ValidationError):
            GaConfig(mutation_prob=-0.1)

    def test_frozen(self) -> None:
        """Test config is immutable."""
        cfg = GaConfig()
        with pytest.raises(ValidationError):
            cfg.rng_seed = 5  # type: ignore[misc]


class TestFitness:
    """Test fitness evaluation."""

    def test_zero_for_difference_set(self, ds_16_6: IndexSet) -> None:
        """Test a DS has fitness 0."""
        target = gds_target(ds_16_6.shape)
        assert fitness(difference_spectrum(ds_16_6), target, GaConfig()) == 0.0

    def test_manual_value(self) -> None:
        """Test {1, 2, 3} against the (6, 3) target."""
        shape = FrameShape(n_users=6, m_rows=3)
        s = IndexSet.of([1, 2, 3], shape)
        value = fitness(difference_spectrum(s), gds_target(shape), GaConfig())
        # peak residual -0.6; squared distance 3(1.1²) + 0.6² + 3(0.9²) = 6.42
        assert value == pytest.approx(0.36 + 1e-4 * 6.42)

    def test_weights(self) -> None:
        """Test weight_rest=0 leaves only the peak term."""
        shape = FrameShape(n_users=6, m_rows=3)
        s = IndexSet.of([1, 2, 3], shape)
        cfg = GaConfig(weight_rest=0.0)
        assert fitness(difference_spectrum(s), gds_target(shape), cfg) == pytest.approx(0.36)

    def test_length_mismatch(self, ds_4_3: IndexSet) -> None:
        """Test mismatched spectrum and target raise."""
        with pytest.raises(ValueError):
            fitness(
                difference_spectrum(ds_4_3),
                gds_target(FrameShape(n_users=6, m_rows=3)),
                GaConfig(),
            )

    def test_population_matches_individual(self, rng: np.random.Generator) -> None:
        """Test batched fitness equals per-individual fitness."""
        shape = FrameShape(n_users=24, m_rows=9)
        cfg = GaConfig(population_size=20)
        target = gds_target(shape)
        population = init_population(shape, cfg, rng)
        batched = population_fitness(population, target, cfg)
        single = [fitness(difference_spectrum(s), target, cfg) for s in population]
        np.testing.assert_allclose(batched, single, rtol=0, atol=1e-12)

    def test_population_empty(self) -> None:
        """Test an empty population gives an empty array."""
        target = gds_target(FrameShape(n_users=6, m_rows=3))
        assert population_fitness([], target, GaConfig()).shape == (0,)


class TestOperators:
    """Test selection, crossover, mutation and replacement."""

    def test_init_population(self, rng: np.random.Generator) -> None:
        """Test population size and individual cardinality."""
        shape = FrameShape(n_users=12, m_rows=5)
        population = init_population(shape, GaConfig(population_size=10), rng)
        assert len(population) == 10
        assert all(len(s) == 5 and s.shape == shape for s in population)

    def test_crossover_preserves_size(self, rng: np.random.Generator) -> None:
        """Test children keep M ones and only use parent indices."""
        shape = FrameShape(n_users=16, m_rows=6)
        p1 = IndexSet.of([0, 1, 2, 3, 4, 5], shape)
        p2 = IndexSet.of([4, 5, 6, 7, 8, 9], shape)
        for _ in range(20):
            c1, c2 = crossover(p1, p2, rng)
            assert len(c1) == len(c2) == 6
            union = set(p1.indices) | set(p2.indices)
            assert set(c1.indices) | set(c2.indices) == union

    def test_crossover_identical_parents(self, ds_16_6: IndexSet, rng: np.random.Generator) -> None:
        """Test crossing a set with itself returns it twice."""
        c1, c2 = crossover(ds_16_6, ds_16_6, rng)
        assert c1 == ds_16_6
        assert c2 == ds_16_6

    def test_mutate_always(self, ds_16_6: IndexSet, rng: np.random.Generator) -> None:
        """Test mutation_prob=1 swaps exactly one member."""
        mutated = mutate(ds_16_6, GaConfig(mutation_prob=1.0), rng)
        assert len(mutated) == 6
        assert len(set(mutated.indices) ^ set(ds_16_6.indices)) == 2

    def test_mutate_never(self, ds_16_6: IndexSet, rng: np.random.Generator) -> None:
        """Test mutation_prob=0 leaves the set unchanged."""
        assert mutate(ds_16_6, GaConfig(mutation_prob=0.0), rng) == ds_16_6

    def test_mutate_full_set(self, rng: np.random.Generator) -> None:
        """Test a set with M = N⁺ has nothing to swap in."""
        full = IndexSet.of(range(8), FrameShape(n_users=8, m_rows=8))
        assert mutate(full, GaConfig(mutation_prob=1.0), rng) == full

    def test_select_pairs_count(self, rng: np.random.Generator) -> None:
        """Test population_size/2 pairs are drawn."""
        shape = FrameShape(n_users=12, m_rows=5)
        cfg = GaConfig(population_size=10)
        population = init_population(shape, cfg, rng)
        pairs = select_pairs(population, np.ones(10), cfg, rng)
        assert len(pairs) == 5

    def test_select_pairs_prefers_perfect(self, ds_16_6: IndexSet, rng: np.random.Generator) -> None:
        """Test a zero-fitness individual dominates selection."""
        shape = ds_16_6.shape
        others = [IndexSet.of(range(i, i + 6), shape) for i in range(3)]
        population = [ds_16_6] + others
        cfg = GaConfig(population_size=4)
        pairs = select_pairs(population, [0.0, 1.0, 1.0, 1.0], cfg, rng)
        assert all(a == ds_16_6 and b == ds_16_6 for a, b in pairs)

    def test_select_pairs_inverse_fitness_ratio(self, rng: np.random.Generator) -> None:
        """Test fitness 1 is picked three times as often as fitness 3."""
        shape = FrameShape(n_users=16, m_rows=6)
        population = [IndexSet.of(range(6), shape), IndexSet.of(range(6, 12), shape)]
        cfg = GaConfig(population_size=20000)
        pairs = select_pairs(population, [1.0, 3.0], cfg, rng)
        picks = [s for pair in pairs for s in pair]
        assert len(picks) == 20000
        ratio = picks.count(population[0]) / picks.count(population[1])
        assert abs(ratio - 3.0) < 0.25

    def test_select_pairs_uniform_on_ties(self, rng: np.random.Generator) -> None:
        """Test equal fitness gives chi-square-uniform picks."""
        shape = FrameShape(n_users=16, m_rows=6)
        population = [IndexSet.of(range(i, i + 6), shape) for i in range(8)]
        position = {s: i for i, s in enumerate(population)}
        cfg = GaConfig(population_size=8000)
        pairs = select_pairs(population, np.full(8, 2.0), cfg, rng)
        counts = np.bincount([position[s] for pair in pairs for s in pair], minlength=8)
        assert counts.sum() == 8000
        assert stats.chisquare(counts).pvalue > 1e-3

    def test_elitist_keeps_better_parent(self, ds_16_6: IndexSet) -> None:
        """Test worse children never displace the best parent."""
        shape = ds_16_6.shape
        cfg = GaConfig()
        target = gds_target(shape)
        worse = IndexSet.of([0, 1, 2, 3, 4, 5], shape)
        kept = elitist_replace(ds_16_6, worse, worse, worse, target, cfg)
        assert kept[0] == ds_16_6
        assert fitness(difference_spectrum(kept[1]), target, cfg) >= 0.0

    def test_elitist_children_win_ties(self) -> None:
        """Test children are preferred on equal fitness."""
        shape = FrameShape(n_users=8, m_rows=7)
        sets = [IndexSet.of([j for j in range(8) if j != i], shape) for i in range(4)]
        target = gds_target(shape)
        c1, c2 = elitist_replace(sets[0], sets[1], sets[2], sets[3], target, GaConfig())
        assert (c1, c2) == (sets[2], sets[3])


class TestRunGa:
    """Test the GA driver."""

    def test_converges_immediately_for_8_7(self) -> None:
        """Test every 7-subset of GF(2)^3 is already a DS."""
        result = run_ga(FrameShape(n_users=8, m_rows=7), GaConfig(rng_seed=1))
        assert result.converged
        assert result.best_fitness == 0.0
        assert result.generations_run == 0
        assert result.fitness_history == [0.0]
        assert is_difference_set(result.best_set)

    def test_unachievable_target(self) -> None:
        """Test the non-integral (6, 3) target never converges."""
        cfg = GaConfig(population_size=20, max_generations=30, rng_seed=2)
        result = run_ga(FrameShape(n_users=6, m_rows=3), cfg)
        assert not result.converged
        assert result.best_fitness > 0.0
        assert result.generations_run == 30
        assert len(result.fitness_history) == 30

    def test_deterministic(self) -> None:
        """Test identical seeds give identical runs."""
        shape = FrameShape(n_users=24, m_rows=9)
        cfg = GaConfig(population_size=20, max_generations=40, rng_seed=7)
        first = run_ga(shape, cfg)
        second = run_ga(shape, cfg)
        assert first.best_set == second.best_set
        assert first.fitness_history == second.fitness_history

    def test_history_non_increasing(self) -> None:
        """Test best-so-far fitness never rises."""
        cfg = GaConfig(population_size=30, max_generations=60, rng_seed=11)
        result = run_ga(FrameShape(n_users=40, m_rows=13), cfg)
        history = np.array(result.fitness_history)
        assert np.all(np.diff(history) <= 0.0)
        assert history[-1] == result.best_fitness

    def test_infinite_threshold_runs_full_budget(self) -> None:
        """Test an infinite threshold disables the early stop."""
        cfg = GaConfig(
            population_size=10, max_generations=5, rng_seed=0, success_threshold=math.inf
        )
        result = run_ga(FrameShape(n_users=8, m_rows=7), cfg)
        assert result.generations_run == 5
        assert result.converged

    @pytest.mark.slow
    def test_finds_16_6_difference_set(self) -> None:
        """Test at least one of five seeded runs reaches fitness 0 for (16, 6)."""
        shape = FrameShape(n_users=16, m_rows=6)
        results = [
            run_ga(shape, GaConfig(population_size=100, max_generations=5000, rng_seed=seed))
            for seed in range(5)
        ]
        for result in results:
            assert np.all(np.diff(result.fitness_history) <= 0.0)
        assert any(r.best_fitness == 0.0 for r in results)

    def test_small_population_finds_16_6(self) -> None:
        """Test a population of 4 evolves to a (16, 6) difference set for some seed."""
        shape = FrameShape(n_users=16, m_rows=6)
        results = [
            run_ga(shape, GaConfig(population_size=4, max_generations=3000, rng_seed=seed))
            for seed in range(10)
        ]
        evolved = [r for r in results if r.generations_run > 0 and r.best_fitness == 0.0]
        assert evolved
        for result in evolved:
            assert result.converged
            assert is_difference_set(result.best_set)
            assert len(result.fitness_history) == result.generations_run
            assert np.all(np.diff(result.fitness_history) <= 0.0)
        for result in results:
            assert np.all(np.diff(result.fitness_history) <= 0.0)

    def test_finds_64_28_difference_set(self) -> None:
        """Test the GA evolves a random population to a (64, 28) difference set."""
        shape = FrameShape(n_users=64, m_rows=28)
        reference = IndexSet.of(bent_support(6), shape)
        assert is_difference_set(reference)
        for seed in range(3):
            cfg = GaConfig(population_size=100, max_generations=2000, rng_seed=seed)
            result = run_ga(shape, cfg)
            history = np.array(result.fitness_history)
            assert result.generations_run > 0
            assert np.all(np.diff(history) <= 0.0)
            if result.best_fitness == 0.0:
                break
        assert result.best_fitness == 0.0
        assert len(history) > 1
        assert is_difference_set(result.best_set)


class TestExhaustiveSearch:
    """Test the brute-force oracle."""

    def test_finds_difference_sets(self) -> None:
        """Test every zero-fitness (4, 3) set is a DS."""
        ranked = exhaustive_search(FrameShape(n_users=4, m_rows=3))
        assert len(ranked) == 4
        assert all(score == 0.0 for _, score in ranked)
        assert all(is_difference_set(s) for s, _ in ranked)

    def test_sorted_by_fitness(self) -> None:
        """Test results are ordered by fitness."""
        ranked = exhaustive_search(FrameShape(n_users=6, m_rows=3))
        scores = [score for _, score in ranked]
        assert scores == sorted(scores)
        assert len(ranked) == math.comb(8, 3)

    def test_16_6_contains_bent_set(self, ds_16_6: IndexSet) -> None:
        """Test the bent-function DS is among the optima."""
        ranked = exhaustive_search(ds_16_6.shape)
        optima = {s.indices for s, score in ranked if score == 0.0}
        assert ds_16_6.indices in optima

    def test_large_n_plus_rejected(self) -> None:
        """Test N⁺ > 16 raises."""
        with pytest.raises(ValueError):
            exhaustive_search(FrameShape(n_users=17, m_rows=4))
