"""Frame assembly, correlation profiles and Welch-bound verification."""

from hadaframe.frames.bipolar import (
    BipolarFrame,
    build_frame,
    export_csv,
    random_bipolar_frame,
    random_signs,
)
from hadaframe.frames.verify import (
    CorrelationProfile,
    FrameClass,
    ProfileReport,
    WelchReport,
    correlation_profile,
    realized_differences,
    verify_profile,
    welch_metrics,
    x_profile,
)

__all__ = [
    "BipolarFrame",
    "build_frame",
    "export_csv",
    "random_bipolar_frame",
    "random_signs",
    "CorrelationProfile",
    "FrameClass",
    "ProfileReport",
    "WelchReport",
    "correlation_profile",
    "realized_differences",
    "verify_profile",
    "welch_metrics",
    "x_profile",
]
