"""Temporal binning of yearly counts and conversion to frequency series.

Two families are supported: variable-width quantile bins, whose number grows
with the log of the total token count, and fixed-width windows of a given
number of years with a minimum-token threshold for a window to be kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

from .errors import DegenerateBin, InsufficientData, ValidationError
from .series import CountSeries, FrequencySeries, total_tokens

BINNED_HEADER = ("year_start", "year_end", "tokens_a", "tokens_b")


@dataclass(frozen=True)
class VariableWidth:
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValidationError("c must be positive")

    @property
    def label(self) -> str:
        return f"c={self.c:g}"


@dataclass(frozen=True)
class FixedWidth:
    width_years: int
    min_tokens: int = 10

    def __post_init__(self):
        if self.width_years < 1:
            raise ValidationError("width_years must be >= 1")
        if self.min_tokens < 0:
            raise ValidationError("min_tokens must be >= 0")

    @property
    def label(self) -> str:
        return f"{self.width_years}y"


@dataclass(frozen=True)
class NoBinning:
    min_tokens: int = 10

    def __post_init__(self):
        if self.min_tokens < 0:
            raise ValidationError("min_tokens must be >= 0")

    @property
    def label(self) -> str:
        return "none"


BinSpec = Union[VariableWidth, FixedWidth, NoBinning]


class Bin(NamedTuple):
    year_start: int
    year_end: int
    tokens_a: int
    tokens_b: int

    @property
    def total(self) -> int:
        return self.tokens_a + self.tokens_b

    @property
    def midpoint(self) -> float:
        return (self.year_start + self.year_end) / 2


@dataclass(frozen=True)
class BinnedCounts:
    bins: tuple[Bin, ...]
    spec: BinSpec | None = None

    def __post_init__(self):
        bins = tuple(Bin(*b) for b in self.bins)
        object.__setattr__(self, "bins", bins)
        for b in bins:
            if b.year_start > b.year_end:
                raise ValidationError("bin starts after it ends")
            if b.tokens_a < 0 or b.tokens_b < 0 or b.total < 1:
                raise ValidationError("every bin needs at least one token")
        for prev, cur in zip(bins, bins[1:]):
            if cur.year_start <= prev.year_end:
                raise ValidationError("bins overlap or are out of order")

    def __len__(self) -> int:
        return len(self.bins)


def n_variable_bins(n_tokens: int, c: float) -> int:
    """Unclamped bin count ceil(c * ln(n_tokens))."""
    return math.ceil(c * math.log(n_tokens))


def variable_width_bin(cs: CountSeries, c: float = 1.0) -> BinnedCounts:
    """Quantile bins holding roughly equal token mass.

    Years are walked in order and bin ``k`` is closed in the first year where
    the running total over the whole series reaches ``k * n / n_bins``; the
    final bin takes whatever is left.  A bin is also closed early when the
    remaining occupied years are only just enough to give every later bin one
    year, so the bin count is exact.
    """
    spec = VariableWidth(c)
    occupied = cs.occupied()
    n = total_tokens(cs)
    if n < 2 or len(occupied) < 2:
        raise InsufficientData("variable-width binning needs >= 2 tokens in >= 2 years")
    n_bins = min(max(n_variable_bins(n, c), 2), len(occupied))

    bins: list[Bin] = []
    start = 0
    acc_a = acc_b = 0
    cumulative = 0
    for i, rec in enumerate(occupied):
        acc_a += rec.count_a
        acc_b += rec.count_b
        cumulative += rec.total
        if len(bins) == n_bins - 1:
            continue
        years_left = len(occupied) - i - 1
        bins_left = n_bins - len(bins) - 1
        # integer form of cumulative >= (k+1) * n / n_bins
        if cumulative * n_bins >= (len(bins) + 1) * n or years_left == bins_left:
            bins.append(Bin(occupied[start].year, rec.year, acc_a, acc_b))
            start = i + 1
            acc_a = acc_b = 0
    bins.append(Bin(occupied[start].year, occupied[-1].year, acc_a, acc_b))
    return BinnedCounts(tuple(bins), spec)


def fixed_width_bin(cs: CountSeries, width_years: int, min_tokens: int = 10) -> BinnedCounts:
    """Windows of ``width_years`` starting at the first occupied year.

    Windows holding fewer than ``max(min_tokens, 1)`` tokens are dropped.
    """
    spec = FixedWidth(width_years, min_tokens)
    return _windows(cs, width_years, min_tokens, spec)


def no_binning(cs: CountSeries, min_tokens: int = 10) -> BinnedCounts:
    return _windows(cs, 1, min_tokens, NoBinning(min_tokens))


def _windows(cs: CountSeries, width: int, min_tokens: int, spec: BinSpec) -> BinnedCounts:
    occupied = cs.occupied()
    if not occupied:
        raise InsufficientData("no tokens")
    y0 = occupied[0].year
    sums: dict[int, list[int]] = {}
    for rec in occupied:
        k = (rec.year - y0) // width
        acc = sums.setdefault(k, [0, 0])
        acc[0] += rec.count_a
        acc[1] += rec.count_b
    threshold = max(min_tokens, 1)
    bins = tuple(
        Bin(y0 + k * width, y0 + (k + 1) * width - 1, a, b)
        for k, (a, b) in sorted(sums.items())
        if a + b >= threshold
    )
    if len(bins) < 2:
        raise InsufficientData(f"only {len(bins)} bin(s) survive the {threshold}-token threshold")
    return BinnedCounts(bins, spec)


def bin_counts(cs: CountSeries, spec: BinSpec) -> BinnedCounts:
    if isinstance(spec, VariableWidth):
        return variable_width_bin(cs, spec.c)
    if isinstance(spec, FixedWidth):
        return fixed_width_bin(cs, spec.width_years, spec.min_tokens)
    if isinstance(spec, NoBinning):
        return no_binning(cs, spec.min_tokens)
    raise TypeError(f"unknown bin spec {spec!r}")


def laplace_smooth(tokens_a: int, tokens_b: int) -> tuple[int, int]:
    """Add one to the zero side of a one-sided bin; leave other bins alone."""
    if tokens_a < 0 or tokens_b < 0:
        raise ValidationError("negative token count")
    if tokens_a == 0 and tokens_b == 0:
        raise DegenerateBin("bin has no tokens")
    if tokens_a == 0:
        return 1, tokens_b
    if tokens_b == 0:
        return tokens_a, 1
    return tokens_a, tokens_b


def to_frequency_series(bc: BinnedCounts) -> FrequencySeries:
    if len(bc.bins) < 2:
        raise InsufficientData("need at least 2 bins")
    t, v, m = [], [], []
    for b in bc.bins:
        a, c = laplace_smooth(b.tokens_a, b.tokens_b)
        t.append(b.midpoint)
        v.append(a / (a + c))
        m.append(b.total)
    return FrequencySeries(tuple(t), tuple(v), tuple(m))


def emit_binned_csv(bc: BinnedCounts) -> str:
    lines = [",".join(BINNED_HEADER)]
    lines += [f"{b.year_start},{b.year_end},{b.tokens_a},{b.tokens_b}" for b in bc.bins]
    return "\n".join(lines) + "\n"
