"""Asymptotic eigenvalue laws used as capacity references.

Supported laws:
- Marchenko-Pastur (iid frames)
- Wachter-Manova (tight frames, ETFs)

Example:
    from hadaframe.theory import get_law, law_capacity_per_user

    law = get_law("manova", beta=0.8, gamma=0.5)
    print(law.lambda_minus, law.lambda_plus)
    print(law_capacity_per_user(law, snr=10.0))

Adding a new law:
    1. Subclass SpectralLaw in laws.py
    2. Register it in LAWS below
"""

from typing import Callable, Dict, Optional

import numpy as np
import numpy.typing as npt
from scipy import stats

from hadaframe.theory.base import LawKind, SpectralLaw
from hadaframe.theory.laws import (
    MarchenkoPasturLaw,
    WachterManovaLaw,
    density_grid,
    law_capacity_per_user,
    law_practical_capacity_per_user,
    manova_law,
    mp_law,
)


def _build_mp(beta: float, gamma: Optional[float]) -> SpectralLaw:
    return mp_law(beta)


def _build_manova(beta: float, gamma: Optional[float]) -> SpectralLaw:
    if gamma is None:
        raise ValueError("The Manova law needs gamma")
    return manova_law(beta, gamma)


# Law registry
# Maps CLI/config names to constructors taking (beta, gamma)
LAWS: Dict[str, Callable[[float, Optional[float]], SpectralLaw]] = {
    "mp": _build_mp,
    "marchenko_pastur": _build_mp,
    "manova": _build_manova,
    "wachter_manova": _build_manova,
}


def get_law(name: str, beta: float, gamma: Optional[float] = None) -> SpectralLaw:
    """Get a law by name.

    Args:
        name: Law name (e.g., "mp", "manova")
        beta: K/M
        gamma: M/N (Manova only)

    Raises:
        ValueError: If the law is unknown or its parameters are invalid
    """
    builder = LAWS.get(name.lower())
    if builder is None:
        raise ValueError(f"Unknown law: {name}. Supported laws: {', '.join(list_laws())}")
    return builder(beta, gamma)


def list_laws() -> list[str]:
    """List all supported law names."""
    return sorted(LAWS.keys())


def empirical_ks_distance(eigs: npt.ArrayLike, law: SpectralLaw) -> float:
    """Kolmogorov-Smirnov distance between observed eigenvalues and the law's cdf."""
    sample = np.ravel(np.asarray(eigs, dtype=np.float64))
    return float(stats.kstest(sample, law.cdf).statistic)


__all__ = [
    "LawKind",
    "SpectralLaw",
    "MarchenkoPasturLaw",
    "WachterManovaLaw",
    "mp_law",
    "manova_law",
    "law_capacity_per_user",
    "law_practical_capacity_per_user",
    "get_law",
    "list_laws",
    "empirical_ks_distance",
    "density_grid",
    "LAWS",
]
