"""XOR difference spectra and the DS / GDS target spectra.

A spectrum counts ordered pairs (u_i, u_m), including i = m, so counts[0] = M
and the Walsh-Hadamard transform of the spectrum equals M² c_k².
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import numpy.typing as npt

from hadaframe.core.types import FrameShape, IndexSet

# Tolerance for comparing real-valued targets against integer counts.
SPECTRUM_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class DifferenceSpectrum:
    """Histogram λ of XOR differences over ordered pairs."""

    counts: npt.NDArray[np.int64]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {"counts": self.counts.tolist()}


@dataclass(frozen=True, eq=False)
class TargetSpectrum:
    """Desired spectrum λ* and the excess α it encodes.

    Attributes:
        values: Real target per difference l
        alpha_excess: Correlation excess α on the upper region (0 for a pure DS)
        integral: True when every target value is an integer (DS feasibility precondition)
    """

    values: npt.NDArray[np.float64]
    alpha_excess: float
    integral: bool

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "values": self.values.tolist(),
            "alpha_excess": self.alpha_excess,
            "integral": self.integral,
        }


def difference_spectrum(s: IndexSet) -> DifferenceSpectrum:
    """Count ordered pairs (u_i, u_m) with u_i XOR u_m = l, for every l."""
    u = s.as_array()
    diffs = u[:, None] ^ u[None, :]
    counts = np.bincount(diffs.ravel(), minlength=s.shape.n_plus).astype(np.int64)
    return DifferenceSpectrum(counts=counts)


def _pair_density(shape: FrameShape) -> float:
    """M(M-1)/(N-1), the DS value of every nonzero difference."""
    m, n = shape.m_rows, shape.n_users
    return m * (m - 1) / (n - 1)


def _is_integral(values: npt.NDArray[np.float64]) -> bool:
    return bool(np.all(np.abs(values - np.round(values)) <= SPECTRUM_ATOL))


def ds_target(shape: FrameShape) -> TargetSpectrum:
    """Target spectrum of a pure difference set (requires N = N⁺).

    Raises:
        ValueError: If N is not a power of two; use gds_target instead
    """
    if not shape.is_power_of_two:
        raise ValueError(
            f"ds_target requires N = N⁺ (got N={shape.n_users}, N⁺={shape.n_plus}); "
            f"use gds_target"
        )
    values = np.full(shape.n_plus, _pair_density(shape), dtype=np.float64)
    values[0] = shape.m_rows
    return TargetSpectrum(values=values, alpha_excess=0.0, integral=_is_integral(values))


def alpha_excess(shape: FrameShape) -> float:
    """Correlation excess α = 2(M-1)(1 - N/N⁺) / (M(N-1)).

    Zero for N = N⁺ and for the degenerate M = 1.
    """
    m, n = shape.m_rows, shape.n_users
    return 2.0 * (m - 1) * (1.0 - n / shape.n_plus) / (m * (n - 1))


def gds_target(shape: FrameShape) -> TargetSpectrum:
    """Three-level target of a generalized difference set.

    values[0] = M, values[N⁻] = (2N/N⁺ - 1) c, all other values (N/N⁺) c,
    with c = M(M-1)/(N-1). Equals ds_target when N = N⁺.
    """
    c = _pair_density(shape)
    ratio = shape.n_users / shape.n_plus
    values = np.full(shape.n_plus, ratio * c, dtype=np.float64)
    values[shape.n_minus] = (2.0 * ratio - 1.0) * c
    values[0] = shape.m_rows
    return TargetSpectrum(
        values=values, alpha_excess=alpha_excess(shape), integral=_is_integral(values)
    )


def welch_level(shape: FrameShape) -> float:
    """Welch bound (N-M)/((N-1)M)."""
    m, n = shape.m_rows, shape.n_users
    return (n - m) / ((n - 1) * m)


def target_correlation_profile(shape: FrameShape) -> npt.NDArray[np.float64]:
    """Target c_k² per k: 1 at k=0, Welch level below N⁻, Welch + α from N⁻ on."""
    profile = np.full(shape.n_plus, welch_level(shape), dtype=np.float64)
    profile[shape.n_minus:] += alpha_excess(shape)
    profile[0] = 1.0
    return profile


def spectrum_residual(
    spectrum: DifferenceSpectrum, target: TargetSpectrum
) -> npt.NDArray[np.float64]:
    """λ - λ* elementwise.

    Raises:
        ValueError: On length mismatch
    """
    if spectrum.counts.shape != target.values.shape:
        raise ValueError(
            f"Spectrum length {spectrum.counts.shape[0]} != target length "
            f"{target.values.shape[0]}"
        )
    return spectrum.counts.astype(np.float64) - target.values


def is_difference_set(s: IndexSet) -> bool:
    """True iff the spectrum of s equals the DS target exactly (requires N = N⁺)."""
    residual = spectrum_residual(difference_spectrum(s), ds_target(s.shape))
    return bool(np.all(np.abs(residual) <= SPECTRUM_ATOL))
