"""Binning-robustness reports and run manifests."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

from . import __version__
from .binning import BinSpec, FixedWidth, NoBinning, VariableWidth, bin_counts, to_frequency_series
from .errors import DegenerateIncrements, InsufficientData, ValidationError
from .fit import SHAPIRO_THRESHOLD, frequency_increment_test
from .series import CountSeries

ORANGE = "orange"
GOLD = "gold"
LIGHT_BLUE = "light-blue"

ROBUST_SELECTION = "robust-selection"
ROBUST_DRIFT = "robust-drift"
SENSITIVE = "binning-sensitive"
UNDETERMINED = "undetermined"

ROBUSTNESS_HEADER = ("strategy", "n_bins", "median_bin_year_ratio", "p_fit", "p_shapiro",
                     "class", "normality_ok", "status")

DEFAULT_STRATEGIES: tuple[BinSpec, ...] = (
    VariableWidth(0.5), VariableWidth(0.75), VariableWidth(1.0), VariableWidth(1.5),
    VariableWidth(2.0), VariableWidth(3.0),
    FixedWidth(5), FixedWidth(10), FixedWidth(15), FixedWidth(20), FixedWidth(25), FixedWidth(30),
    NoBinning(),
)


def parse_strategy(text: str, min_tokens: int = 10) -> BinSpec:
    """``c=1.5`` -> variable width, ``10y`` -> fixed width, ``none`` -> no binning."""
    text = text.strip().lower()
    try:
        if text.startswith("c="):
            return VariableWidth(float(text[2:]))
        if text.endswith("y"):
            return FixedWidth(int(text[:-1]), min_tokens)
    except ValueError:
        pass
    else:
        if text in ("none", "no-bin", "nobin"):
            return NoBinning(min_tokens)
    raise ValidationError(f"cannot parse binning strategy {text!r}")


def classify(p: float, cuts: tuple[float, float] = (0.05, 0.2)) -> str:
    if p < cuts[0]:
        return ORANGE
    if p < cuts[1]:
        return GOLD
    return LIGHT_BLUE


@dataclass(frozen=True)
class RobustnessRow:
    strategy: str
    n_bins: int | None
    median_bin_year_ratio: float | None
    p_fit: float | None
    p_shapiro: float | None
    cls: str | None
    normality_ok: bool
    status: str

    def as_fields(self) -> list[str]:
        def f(x):
            return "NA" if x is None else repr(x) if isinstance(x, float) else str(x)
        return [self.strategy, f(self.n_bins), f(self.median_bin_year_ratio), f(self.p_fit),
                f(self.p_shapiro), f(self.cls), str(self.normality_ok).lower(), self.status]


@dataclass(frozen=True)
class RobustnessReport:
    rows: tuple[RobustnessRow, ...]
    verdict: str

    def to_csv(self) -> str:
        lines = [",".join(ROBUSTNESS_HEADER)]
        lines += [",".join(r.as_fields()) for r in self.rows]
        return "\n".join(lines) + "\n"


def _occupied_years_per_bin(cs: CountSeries, bins) -> list[int]:
    occupied = [r.year for r in cs.occupied()]
    return [sum(1 for y in occupied if b.year_start <= y <= b.year_end) for b in bins]


def robustness_report(cs: CountSeries, strategies: Sequence[BinSpec] = DEFAULT_STRATEGIES,
                      cuts: tuple[float, float] = (0.05, 0.2),
                      shapiro_threshold: float = SHAPIRO_THRESHOLD) -> RobustnessReport:
    """Run the test under every binning strategy and compare the outcomes.

    The verdict only looks at rows whose increments pass the normality gate:
    all orange is robust selection, all light blue robust drift, anything
    else is binning-sensitive.
    """
    rows = []
    for spec in strategies:
        try:
            bc = bin_counts(cs, spec)
            fs = to_frequency_series(bc)
            res = frequency_increment_test(fs, shapiro_threshold)
        except InsufficientData:
            rows.append(RobustnessRow(spec.label, None, None, None, None, None, False, "insufficient-data"))
            continue
        except DegenerateIncrements:
            rows.append(RobustnessRow(spec.label, len(bc), None, None, None, None, False, "degenerate"))
            continue
        ratio = float(statistics.median(_occupied_years_per_bin(cs, bc.bins)))
        rows.append(RobustnessRow(spec.label, len(bc), ratio, res.p_fit, res.p_shapiro,
                                  classify(res.p_fit, cuts), res.normality_ok, "ok"))
    eligible = {r.cls for r in rows if r.status == "ok" and r.normality_ok}
    if not eligible:
        verdict = UNDETERMINED
    elif eligible == {ORANGE}:
        verdict = ROBUST_SELECTION
    elif eligible == {LIGHT_BLUE}:
        verdict = ROBUST_DRIFT
    else:
        verdict = SENSITIVE
    return RobustnessReport(tuple(rows), verdict)


@dataclass
class RunManifest:
    subcommand: str
    params: dict
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    seed: int | None = None
    version: str = __version__
    started: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def to_text(self) -> str:
        """Flat ``key = value`` text; parameter keys can be fed back as a config file."""
        lines = [f"{k} = {_flat(v)}" for k, v in sorted(self.params.items())]
        lines += [
            f"manifest.subcommand = {self.subcommand}",
            f"manifest.inputs = {','.join(self.inputs)}",
            f"manifest.outputs = {','.join(self.outputs)}",
            f"manifest.seed = {'' if self.seed is None else self.seed}",
            f"manifest.version = {self.version}",
            f"manifest.started = {self.started}",
        ]
        return "\n".join(lines) + "\n"


def _flat(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v)
