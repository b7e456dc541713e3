"""Ordinal-pattern tests of distributional symmetry for stationary time series."""

from .errors import OrdsymError
from .estimators import (
    PatternCounts,
    count_patterns,
    d2_statistic,
    grouped_frequencies,
    kernel_h,
    symbolic_correlation,
    theta,
    u_statistic,
)
from .generators import ProcessSpec, generate, parse_process, power_experiment, subordinate
from .longrun import estimate_omega, w_covariance
from .nulldist import TestConfig, TestReport, p_value, quantile, run_test, sample_null
from .partitions import (
    Partition,
    custom_partition,
    gaussian_partition,
    reflection_partition,
    reversal_partition,
    singleton_partition,
)
from .patterns import extract_pattern, pattern_sequence, reflect, reverse
from .spectral import SpectralModel, build_spectral_model, operator_matrix

__version__ = "0.1.0"

__all__ = [
    "OrdsymError",
    "PatternCounts",
    "Partition",
    "ProcessSpec",
    "SpectralModel",
    "TestConfig",
    "TestReport",
    "build_spectral_model",
    "count_patterns",
    "custom_partition",
    "d2_statistic",
    "estimate_omega",
    "extract_pattern",
    "gaussian_partition",
    "generate",
    "grouped_frequencies",
    "kernel_h",
    "operator_matrix",
    "p_value",
    "parse_process",
    "pattern_sequence",
    "power_experiment",
    "quantile",
    "reflect",
    "reflection_partition",
    "reverse",
    "reversal_partition",
    "run_test",
    "sample_null",
    "singleton_partition",
    "subordinate",
    "symbolic_correlation",
    "theta",
    "u_statistic",
    "w_covariance",
]
