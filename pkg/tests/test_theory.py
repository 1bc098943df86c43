"""Tests for the asymptotic eigenvalue laws."""

import math

import numpy as np
import pytest
from scipy import integrate

from hadaframe.capacity.montecarlo import capacity, gram_eigenvalues, sample_subframe
from hadaframe.core.types import FrameShape, IndexSet
from hadaframe.frames.bipolar import build_frame, random_signs
from hadaframe.theory import (
    MarchenkoPasturLaw,
    WachterManovaLaw,
    density_grid,
    empirical_ks_distance,
    get_law,
    law_capacity_per_user,
    law_practical_capacity_per_user,
    list_laws,
    manova_law,
    mp_law,
)
from tests.conftest import bent_support


def _mp_capacity_closed_form(beta: float, snr: float) -> float:
    """Per-user capacity of an iid spread channel with load β."""
    f = (
        math.sqrt(snr * (1 + math.sqrt(beta)) ** 2 + 1)
        - math.sqrt(snr * (1 - math.sqrt(beta)) ** 2 + 1)
    ) ** 2
    return (
        math.log2(1 + snr - f / 4)
        + math.log2(1 + snr * beta - f / 4) / beta
        - math.log2(math.e) * f / (4 * beta * snr)
    )


def _iid_gram_eigenvalues(
    m_rows: int, k_active: int, draws: int, rng: np.random.Generator
) -> np.ndarray:
    blocks = np.stack([random_signs(rng, m_rows, k_active) for _ in range(draws)])
    blocks = blocks.astype(np.float64) / math.sqrt(m_rows)
    return np.linalg.eigvalsh(np.swapaxes(blocks, -1, -2) @ blocks)


class TestEdges:
    """Test support edges and atoms."""

    def test_manova_edges(self) -> None:
        """Test Manova β=0.8, γ=0.5."""
        law = manova_law(0.8, 0.5)
        assert law.lambda_minus == pytest.approx(0.02020, abs=1e-5)
        assert law.lambda_plus == pytest.approx(1.97980, abs=1e-5)
        assert law.atom_mass == 0.0

    def test_mp_edges(self) -> None:
        """Test MP β=0.5."""
        law = mp_law(0.5)
        assert law.lambda_minus == pytest.approx(0.08579, abs=1e-5)
        assert law.lambda_plus == pytest.approx(2.91421, abs=1e-5)
        assert law.gamma == 0.0

    def test_mp_atom_above_one(self) -> None:
        """Test MP β=2 has mass 1/2 at 0."""
        law = mp_law(2.0)
        assert law.atom_mass == pytest.approx(0.5)
        assert law.atom_location == 0.0

    def test_manova_atom(self) -> None:
        """Test Manova β=1, γ=0.75 has mass 2/3 at 4/3."""
        law = manova_law(1.0, 0.75)
        assert law.atom_mass == pytest.approx(2.0 / 3.0)
        assert law.atom_location == pytest.approx(4.0 / 3.0)
        assert law.lambda_minus == pytest.approx(0.0, abs=1e-12)
        assert law.lambda_plus == pytest.approx(1.0)

    @pytest.mark.parametrize("beta_inv", [1.25, 1.5, 1.75])
    @pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
    def test_atom_mass_on_sweep_grid(self, beta_inv: float, p: float) -> None:
        """Test the atom is (K - (N - M))/K when K > N - M, else absent."""
        gamma = p * beta_inv
        if gamma >= 1.0:
            pytest.skip("gamma >= 1 is skipped by the sweep")
        law = manova_law(1.0 / beta_inv, gamma)
        expected = max(0.0, 1.0 - (1.0 - gamma) / p)
        assert law.atom_mass == pytest.approx(expected, abs=1e-12)
        if p == 0.25:
            assert law.atom_mass == 0.0

    def test_invalid_parameters(self) -> None:
        """Test parameter validation."""
        with pytest.raises(ValueError):
            mp_law(0.0)
        with pytest.raises(ValueError):
            manova_law(0.8, 1.0)
        with pytest.raises(ValueError):
            manova_law(0.8, 0.0)
        with pytest.raises(ValueError):
            manova_law(2.0, 0.75)
        with pytest.raises(ValueError):
            manova_law(-1.0, 0.5)


class TestMasses:
    """Test normalization and moments."""

    @pytest.mark.parametrize("beta", [0.2, 0.5, 0.8, 1.0, 1.5, 3.0])
    def test_mp_mass_and_mean(self, beta: float) -> None:
        """Test MP integrates to 1 with mean 1."""
        law = mp_law(beta)
        assert law.total_mass() == pytest.approx(1.0, abs=1e-6)
        assert law.mean() == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize(
        "beta,gamma", [(0.8, 0.5), (0.5, 0.5), (0.8, 0.2), (0.57, 0.4375), (1.0, 0.75)]
    )
    def test_manova_mass_and_mean(self, beta: float, gamma: float) -> None:
        """Test Manova integrates to 1 with mean 1."""
        law = manova_law(beta, gamma)
        assert law.total_mass() == pytest.approx(1.0, abs=1e-6)
        assert law.mean() == pytest.approx(1.0, abs=1e-6)

    def test_density_zero_outside_support(self) -> None:
        """Test density vanishes outside the edges."""
        law = manova_law(0.8, 0.5)
        values = law.density([0.0, law.lambda_minus, law.lambda_plus, 3.0])
        np.testing.assert_array_equal(values, 0.0)
        assert law.density(1.0)[0] > 0.0

    def test_manova_approaches_mp(self) -> None:
        """Test Manova density tends to MP as γ -> 0."""
        mp = mp_law(0.5)
        manova = manova_law(0.5, 1e-6)
        grid = np.linspace(mp.lambda_minus + 0.2, mp.lambda_plus - 0.2, 50)
        np.testing.assert_allclose(manova.density(grid), mp.density(grid), rtol=1e-4)


class TestCdf:
    """Test the tabulated cdf."""

    def test_endpoints(self) -> None:
        """Test 0 below the support and 1 above it."""
        law = manova_law(0.8, 0.5)
        out = law.cdf([-1.0, law.lambda_minus, law.lambda_plus, 5.0])
        assert out[0] == 0.0
        assert out[1] == pytest.approx(0.0, abs=1e-12)
        assert out[2] == pytest.approx(1.0, abs=1e-6)
        assert out[3] == pytest.approx(1.0, abs=1e-6)

    def test_monotone(self) -> None:
        """Test the cdf is non-decreasing."""
        law = mp_law(0.8)
        out = law.cdf(np.linspace(-0.5, 4.0, 400))
        assert np.all(np.diff(out) >= 0.0)

    def test_matches_quadrature(self) -> None:
        """Test the tabulated cdf agrees with direct integration."""
        law = mp_law(0.5)
        x = 1.2
        direct, _ = integrate.quad(lambda v: float(law.density(v)[0]), law.lambda_minus, x)
        assert law.cdf(x)[0] == pytest.approx(direct, abs=1e-6)

    def test_atom_jump(self) -> None:
        """Test the atom adds a jump at its location."""
        law = mp_law(2.0)
        assert law.cdf(0.0)[0] == pytest.approx(0.5, abs=1e-9)
        assert law.cdf(-1e-9)[0] == 0.0


class TestDensityGrid:
    """Test densities tabulated on a shared grid."""

    def test_grid_spans_all_supports(self) -> None:
        """Test the grid runs from the smallest λ₋ to the largest λ₊."""
        mp, manova = mp_law(0.8), manova_law(0.8, 0.5)
        xs, densities = density_grid([manova, mp], 2001)
        assert densities.shape == (2, 2001)
        assert xs[0] == pytest.approx(mp.lambda_minus)
        assert xs[-1] == pytest.approx(mp.lambda_plus)
        np.testing.assert_allclose(densities[0], manova.density(xs))
        np.testing.assert_allclose(densities[1], mp.density(xs))

    def test_continuous_mass(self) -> None:
        """Test trapezoid mass of each density matches its continuous part."""
        laws = [mp_law(2.0), manova_law(0.5, 0.5)]
        xs, densities = density_grid(laws, 20001)
        for law, d in zip(laws, densities):
            assert integrate.trapezoid(d, xs) == pytest.approx(1.0 - law.atom_mass, abs=0.01)

    def test_invalid_arguments(self) -> None:
        """Test an empty law list and fewer than two points raise."""
        with pytest.raises(ValueError):
            density_grid([], 10)
        with pytest.raises(ValueError):
            density_grid([mp_law(0.5)], 1)


class TestLawCapacity:
    """Test capacity and practical capacity against the laws."""

    @pytest.mark.parametrize("beta", [0.25, 0.5, 0.8, 1.0, 2.0])
    def test_mp_capacity_closed_form(self, beta: float) -> None:
        """Test the MP capacity integral against the closed form."""
        value = law_capacity_per_user(mp_law(beta), 10.0)
        assert value == pytest.approx(_mp_capacity_closed_form(beta, 10.0), abs=1e-5)

    def test_mp_practical_closed_form(self) -> None:
        """Test E[ln λ] = -1 + (β - 1)/β ln(1 - β) under MP."""
        beta, snr = 0.5, 10.0
        expected = math.log2(snr) + (-1.0 + (beta - 1) / beta * math.log(1 - beta)) / math.log(2)
        assert law_practical_capacity_per_user(mp_law(beta), snr) == pytest.approx(
            expected, abs=1e-6
        )

    def test_mp_practical_at_unit_load(self) -> None:
        """Test the integrable singularity at β=1 gives a finite value."""
        value = law_practical_capacity_per_user(mp_law(1.0), 10.0)
        assert value == pytest.approx(math.log2(10.0) - 1.0 / math.log(2), abs=1e-5)

    def test_mp_practical_with_zero_atom(self) -> None:
        """Test an atom at 0 gives -inf."""
        assert law_practical_capacity_per_user(mp_law(2.0), 10.0) == -math.inf

    def test_monotone_concave_in_snr(self) -> None:
        """Test capacity grows with snr, with diminishing increments."""
        law = manova_law(0.8, 0.5)
        values = [law_capacity_per_user(law, snr) for snr in (1.0, 2.0, 3.0, 4.0)]
        steps = np.diff(values)
        assert np.all(steps > 0.0)
        assert np.all(np.diff(steps) < 0.0)

    def test_manova_beats_mp(self) -> None:
        """Test tight-frame subsets outperform iid at equal load."""
        beta = 1.0 / 1.5
        assert law_capacity_per_user(manova_law(beta, 0.75), 10.0) > law_capacity_per_user(
            mp_law(beta), 10.0
        )

    def test_atom_term(self) -> None:
        """Test the atom contributes mass times log2(1 + snr x)."""
        law = manova_law(1.0, 0.75)
        continuous = law.integrate_continuous(lambda x: math.log2(1.0 + 3.0 * x))
        expected = continuous + (2.0 / 3.0) * math.log2(1.0 + 3.0 * 4.0 / 3.0)
        assert law_capacity_per_user(law, 3.0) == pytest.approx(expected, abs=1e-9)

    def test_invalid_snr(self) -> None:
        """Test snr <= 0 raises."""
        with pytest.raises(ValueError):
            law_capacity_per_user(mp_law(0.5), 0.0)
        with pytest.raises(ValueError):
            law_practical_capacity_per_user(mp_law(0.5), -1.0)


class TestRegistry:
    """Test law lookup by name."""

    def test_get_law(self) -> None:
        """Test names map to law classes, case-insensitively."""
        assert isinstance(get_law("MP", 0.5), MarchenkoPasturLaw)
        assert isinstance(get_law("manova", 0.5, 0.5), WachterManovaLaw)
        assert isinstance(get_law("wachter_manova", 0.5, 0.5), WachterManovaLaw)

    def test_manova_needs_gamma(self) -> None:
        """Test Manova without gamma raises."""
        with pytest.raises(ValueError):
            get_law("manova", 0.5)

    def test_unknown_law(self) -> None:
        """Test unknown names raise."""
        with pytest.raises(ValueError) as exc:
            get_law("semicircle", 0.5)
        assert "Supported laws" in str(exc.value)

    def test_list_laws(self) -> None:
        """Test all registered names are listed."""
        assert list_laws() == ["manova", "marchenko_pastur", "mp", "wachter_manova"]

    def test_to_dict(self) -> None:
        """Test serialization."""
        data = manova_law(0.8, 0.5).to_dict()
        assert data["kind"] == "wachter_manova"
        assert data["gamma"] == 0.5


@pytest.mark.slow
class TestMonteCarloOracle:
    """Test the laws against large iid frames."""

    def test_mp_capacity_matches_large_frames(self) -> None:
        """Test MP β=0.8 capacity against M=512, K=410 iid subframes."""
        rng = np.random.default_rng(17)
        eigs = _iid_gram_eigenvalues(512, 410, 4, rng)
        empirical = float(np.mean(capacity(eigs, 10.0))) / 410
        assert empirical == pytest.approx(law_capacity_per_user(mp_law(0.8), 10.0), abs=0.02)

    def test_mp_ks_distance(self) -> None:
        """Test the empirical eigenvalue cdf is close to MP at M=256, β=0.8."""
        rng = np.random.default_rng(23)
        eigs = _iid_gram_eigenvalues(256, 205, 5, rng)
        assert empirical_ks_distance(eigs, mp_law(205 / 256)) < 0.05

    def test_etf_manova_ks_distance(self) -> None:
        """Test K=96 subsets of the (256, 120) ETF follow Manova β=0.8, γ=120/256."""
        frame = build_frame(IndexSet.of(bent_support(8), FrameShape(n_users=256, m_rows=120)))
        rng = np.random.default_rng(29)
        eigs = np.concatenate(
            [gram_eigenvalues(frame, sample_subframe(frame, 96, rng)) for _ in range(10)]
        )
        assert empirical_ks_distance(eigs, manova_law(96 / 120, 120 / 256)) < 0.05
