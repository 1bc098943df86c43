"""Marchenko-Pastur and Wachter-Manova laws, and capacity against them.

Marchenko-Pastur describes K-subsets of iid frames; Wachter-Manova describes
K-subsets of tight frames with aspect ratio γ = M/N. Both are indexed by
β = K/M. Capacities are per user: E[log₂(1 + snr λ)] under the law.
"""

import logging
import math
from typing import Sequence, Tuple

import numpy as np
import numpy.typing as npt

from hadaframe.theory.base import LawKind, SpectralLaw

logger = logging.getLogger(__name__)


class MarchenkoPasturLaw(SpectralLaw):
    """Edges (1 ± √β)²; for β > 1 an atom of mass 1 - 1/β sits at 0."""

    kind = LawKind.MARCHENKO_PASTUR

    def __init__(self, beta: float) -> None:
        if not beta > 0.0:
            raise ValueError(f"Marchenko-Pastur requires beta > 0, got {beta}")
        root = math.sqrt(beta)
        atom = 1.0 - 1.0 / beta if beta > 1.0 else 0.0
        super().__init__(
            beta=beta,
            gamma=0.0,
            lambda_minus=(1.0 - root) ** 2,
            lambda_plus=(1.0 + root) ** 2,
            atom_mass=atom,
            atom_location=0.0,
        )

    def tail_factor(self, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return np.ones_like(x)


class WachterManovaLaw(SpectralLaw):
    """Edges (√(β(1-γ)) ± √(1-βγ))², atom max(0, 1 + 1/β - 1/(βγ)) at 1/γ."""

    kind = LawKind.WACHTER_MANOVA

    def __init__(self, beta: float, gamma: float) -> None:
        if not beta > 0.0:
            raise ValueError(f"Wachter-Manova requires beta > 0, got {beta}")
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"Wachter-Manova requires 0 < gamma < 1, got {gamma}")
        if beta * gamma > 1.0:
            raise ValueError(
                f"Wachter-Manova requires beta*gamma <= 1, got beta={beta}, gamma={gamma}"
            )
        a = math.sqrt(beta * (1.0 - gamma))
        b = math.sqrt(1.0 - beta * gamma)
        super().__init__(
            beta=beta,
            gamma=gamma,
            lambda_minus=(a - b) ** 2,
            lambda_plus=(a + b) ** 2,
            atom_mass=max(0.0, 1.0 + 1.0 / beta - 1.0 / (beta * gamma)),
            atom_location=1.0 / gamma,
        )

    def tail_factor(self, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return 1.0 - self.gamma * np.asarray(x, dtype=np.float64)


def mp_law(beta: float) -> SpectralLaw:
    """Marchenko-Pastur law with ratio β = K/M.

    Raises:
        ValueError: If beta <= 0
    """
    return MarchenkoPasturLaw(beta)


def manova_law(beta: float, gamma: float) -> SpectralLaw:
    """Wachter-Manova law with β = K/M and γ = M/N.

    Raises:
        ValueError: Unless beta > 0, 0 < gamma < 1 and beta*gamma <= 1
    """
    return WachterManovaLaw(beta, gamma)


def law_capacity_per_user(law: SpectralLaw, snr: float) -> float:
    """∫ log₂(1 + snr x) f(x) dx plus the atom term."""
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    return law.expect(lambda x: math.log2(1.0 + snr * x))


def _log2_snr(snr: float, x: float) -> float:
    return math.log2(snr * x) if x > 0.0 else float("-inf")


def law_practical_capacity_per_user(law: SpectralLaw, snr: float) -> float:
    """∫ log₂(snr x) f(x) dx plus the atom term; -inf if the law has an atom at 0."""
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    if law.atom_mass > 0.0 and law.atom_location == 0.0:
        logger.debug("%r carries mass at 0; practical capacity is -inf", law)
        return float("-inf")
    return law.expect(lambda x: _log2_snr(snr, x))


def density_grid(
    laws: Sequence[SpectralLaw], points: int = 400
) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Continuous densities of several laws on one shared x-grid.

    The grid runs from the smallest λ₋ to the largest λ₊. Atoms are not part
    of the densities; read them from each law's atom_mass and atom_location.

    Returns:
        (xs, densities) with densities[i] belonging to laws[i]

    Raises:
        ValueError: If no law is given or points < 2
    """
    if not laws:
        raise ValueError("density_grid needs at least one law")
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    lo = min(law.lambda_minus for law in laws)
    hi = max(law.lambda_plus for law in laws)
    xs = np.linspace(lo, hi, points)
    densities = np.stack([law.density(xs) for law in laws])
    for law in laws:
        if law.atom_mass > 0.0:
            logger.info(
                "%s: atom of mass %.6g at %.6g left out of the density",
                law.kind.value, law.atom_mass, law.atom_location,
            )
    return xs, densities
