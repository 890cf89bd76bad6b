"""Frequency Increment Test tooling: binning, testing and Wright-Fisher sweeps."""

__version__ = "0.1.0"

from .binning import (  # noqa: E402
    BinnedCounts,
    FixedWidth,
    NoBinning,
    VariableWidth,
    bin_counts,
    fixed_width_bin,
    laplace_smooth,
    to_frequency_series,
    variable_width_bin,
)
from .fit import FitResult, frequency_increment_test, increment_variance_terms, rescale_increments  # noqa: E402
from .series import CountSeries, FrequencySeries, parse_counts_csv, total_tokens  # noqa: E402

__all__ = [
    "BinnedCounts",
    "CountSeries",
    "FitResult",
    "FixedWidth",
    "FrequencySeries",
    "NoBinning",
    "VariableWidth",
    "bin_counts",
    "fixed_width_bin",
    "frequency_increment_test",
    "increment_variance_terms",
    "laplace_smooth",
    "parse_counts_csv",
    "rescale_increments",
    "to_frequency_series",
    "total_tokens",
    "variable_width_bin",
]
