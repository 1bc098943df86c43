"""Cross-correlation profiles, ETF/AETF verification and Welch-bound metrics."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet

import numpy as np
import numpy.typing as npt

from hadaframe.core.gf2 import hadamard_matrix
from hadaframe.core.spectra import target_correlation_profile, welch_level
from hadaframe.core.types import FrameShape, IndexSet
from hadaframe.frames.bipolar import BipolarFrame

# Exactness is reachable: profiles are integer sums divided by M.
DEFAULT_TOLERANCE = 1e-12


class FrameClass(Enum):
    """Verification outcome."""

    EXACT_ETF = "exact-ETF"
    EXACT_AETF = "exact-AETF"
    APPROXIMATE = "approximate"


@dataclass(frozen=True, eq=False)
class CorrelationProfile:
    """c_k for every k in [0, N⁺), plus the differences realized by column pairs.

    c_k is the Gram entry between any columns n and n XOR k (both < N).
    """

    c: npt.NDArray[np.float64]
    realized_ks: FrozenSet[int]
    shape: FrameShape

    def squared(self) -> npt.NDArray[np.float64]:
        return self.c**2


def realized_differences(n_users: int) -> FrozenSet[int]:
    """{n XOR m : 0 <= n != m < N}."""
    cols = np.arange(n_users)
    diffs = np.unique(cols[:, None] ^ cols[None, :])
    return frozenset(int(k) for k in diffs if k != 0)


def correlation_profile(s: IndexSet) -> CorrelationProfile:
    """c[k] = (1/M) sum_m (-1)^<k, u_m>."""
    shape = s.shape
    columns = hadamard_matrix(shape.n_plus)[:, s.as_array()].astype(np.float64)
    c = columns.sum(axis=1) / shape.m_rows
    return CorrelationProfile(c=c, realized_ks=realized_differences(shape.n_users), shape=shape)


def x_profile(profile: CorrelationProfile) -> npt.NDArray[np.float64]:
    """x_k = M² (c_k² - Welch level)."""
    m = profile.shape.m_rows
    return np.asarray(m * m * (profile.squared() - welch_level(profile.shape)))


@dataclass(frozen=True)
class ProfileReport:
    """Deviation of realized c_k² from the ETF and AETF targets.

    Attributes:
        classification: exact-ETF, exact-AETF or approximate
        max_dev_etf: Max |c_k² - Welch level| over realized k
        max_dev_lower: Max |c_k² - target| over realized k in [1, N⁻)
        max_dev_upper: Max |c_k² - target| over realized k in [N⁻, N⁺)
        welch_level: (N-M)/((N-1)M)
        upper_level: Welch level + α
        tolerance: Tolerance used for the exact classes
    """

    classification: FrameClass
    max_dev_etf: float
    max_dev_lower: float
    max_dev_upper: float
    welch_level: float
    upper_level: float
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def max_dev_aetf(self) -> float:
        return max(self.max_dev_lower, self.max_dev_upper)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "classification": self.classification.value,
            "max_dev_etf": self.max_dev_etf,
            "max_dev_lower": self.max_dev_lower,
            "max_dev_upper": self.max_dev_upper,
            "welch_level": self.welch_level,
            "upper_level": self.upper_level,
            "tolerance": self.tolerance,
        }


def _max_abs(values: npt.NDArray[np.float64]) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def verify_profile(s: IndexSet, tol: float = DEFAULT_TOLERANCE) -> ProfileReport:
    """Compare realized c_k² with the Welch level and the three-level AETF target."""
    shape = s.shape
    profile = correlation_profile(s)
    squared = profile.squared()
    target = target_correlation_profile(shape)
    welch = welch_level(shape)

    ks = np.array(sorted(profile.realized_ks), dtype=np.int64)
    lower = ks[ks < shape.n_minus]
    upper = ks[ks >= shape.n_minus]

    dev_etf = _max_abs(squared[ks] - welch)
    dev_lower = _max_abs(squared[lower] - target[lower])
    dev_upper = _max_abs(squared[upper] - target[upper])

    if dev_etf <= tol:
        classification = FrameClass.EXACT_ETF
    elif max(dev_lower, dev_upper) <= tol:
        classification = FrameClass.EXACT_AETF
    else:
        classification = FrameClass.APPROXIMATE

    return ProfileReport(
        classification=classification,
        max_dev_etf=dev_etf,
        max_dev_lower=dev_lower,
        max_dev_upper=dev_upper,
        welch_level=welch,
        upper_level=float(target[-1]),
        tolerance=tol,
    )


@dataclass(frozen=True)
class WelchReport:
    """Welch-bound metrics of a frame.

    Attributes:
        i_ms: Mean-square cross correlation over n != k
        i_max: Max-square cross correlation over n != k
        welch_bound: (N-M)/((N-1)M)
        tightness_residual: max |FFᵀ - (N/M) I|
    """

    i_ms: float
    i_max: float
    welch_bound: float
    tightness_residual: float = field(default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "i_ms": self.i_ms,
            "i_max": self.i_max,
            "welch_bound": self.welch_bound,
            "tightness_residual": self.tightness_residual,
        }


def welch_metrics(f: BipolarFrame) -> WelchReport:
    """Mean-square and max-square cross correlation and the tightness residual."""
    shape = f.shape
    n, m = shape.n_users, shape.m_rows
    gram = f.gram()
    off_diag = ~np.eye(n, dtype=bool)
    squares = gram[off_diag] ** 2
    tight = f.row_gram() - (n / m) * np.eye(m)
    return WelchReport(
        i_ms=float(squares.sum() / (n * (n - 1))),
        i_max=float(squares.max()),
        welch_bound=welch_level(shape),
        tightness_residual=float(np.max(np.abs(tight))),
    )
