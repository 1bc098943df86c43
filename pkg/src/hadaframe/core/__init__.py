"""Core components: frame shapes, GF(2)^L arithmetic, and difference spectra."""

from hadaframe.core.types import FrameShape, IndexSet
from hadaframe.core.gf2 import (
    binary_inner,
    hadamard_entry,
    hadamard_matrix,
    hadamard_rows,
    walsh_hadamard_transform,
    walsh_hadamard_transform_direct,
    xor_diff,
)
from hadaframe.core.spectra import (
    DifferenceSpectrum,
    TargetSpectrum,
    alpha_excess,
    difference_spectrum,
    ds_target,
    gds_target,
    is_difference_set,
    spectrum_residual,
    target_correlation_profile,
    welch_level,
)

__all__ = [
    "FrameShape",
    "IndexSet",
    "binary_inner",
    "hadamard_entry",
    "hadamard_matrix",
    "hadamard_rows",
    "walsh_hadamard_transform",
    "walsh_hadamard_transform_direct",
    "xor_diff",
    "DifferenceSpectrum",
    "TargetSpectrum",
    "alpha_excess",
    "difference_spectrum",
    "ds_target",
    "gds_target",
    "is_difference_set",
    "spectrum_residual",
    "target_correlation_profile",
    "welch_level",
]
