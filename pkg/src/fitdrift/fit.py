"""The Frequency Increment Test.

Successive frequency changes are rescaled by the drift standard deviation
expected over the elapsed time,

    Y_i = (v_i - v_{i-1}) / sqrt(2 v_{i-1} (1 - v_{i-1}) (t_i - t_{i-1})),

and a two-sided one-sample t-test checks whether the mean of the ``Y_i`` is
zero.  A Shapiro-Wilk test on the same increments tells whether the t-test's
normality assumption is tenable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateIncrements, InsufficientData, ValidationError, ZeroTimeStep
from .numerics import shapiro_wilk_batch, t_two_sided_p_array
from .series import FrequencySeries

ALPHA_LEVELS = (0.05, 0.2)
SHAPIRO_THRESHOLD = 0.1
LOW_POWER_INCREMENTS = 5

SELECTION = "selection-flagged"
NOT_REJECTED = "not-rejected"


def rescale_increments(fs: FrequencySeries) -> list[float]:
    t = np.asarray(fs.t)
    if np.any(np.diff(t) == 0):
        raise ZeroTimeStep("two points share a time coordinate")
    return [float(y) for y in increments_matrix(t, np.asarray(fs.v)[None, :])[0]]


def increments_matrix(t: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rescaled increments for each row of a frequency matrix sharing ``t``."""
    dt = np.diff(np.asarray(t, dtype=float))
    prev = v[:, :-1]
    return np.diff(v, axis=1) / np.sqrt(2.0 * prev * (1.0 - prev) * dt)


class FitBatch(NamedTuple):
    t_stat: np.ndarray
    p_fit: np.ndarray
    w: np.ndarray
    p_shapiro: np.ndarray
    degenerate: np.ndarray
    df: int


def fit_batch(t, v: np.ndarray) -> FitBatch:
    """Run the test on every row of ``v`` (replicates x points).

    Rows whose increments have zero spread are marked degenerate and get NaN
    statistics.  Shapiro-Wilk results are NaN when there are fewer than three
    increments.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[1] < 3:
        raise InsufficientData("the increment test needs at least 3 points")
    y = increments_matrix(t, v)
    k = y.shape[1]
    mean = y.mean(axis=1)
    sd = y.std(axis=1, ddof=1)
    scale = np.abs(y).max(axis=1)
    degenerate = ~(sd > 1e-12 * scale)
    safe_sd = np.where(degenerate, 1.0, sd)
    t_stat = mean / (safe_sd / math.sqrt(k))
    p = t_two_sided_p_array(np.where(degenerate, 0.0, t_stat), k - 1)
    t_stat = np.where(degenerate, np.nan, t_stat)
    p = np.where(degenerate, np.nan, p)
    if k >= 3:
        w, ps = shapiro_wilk_batch(y)
        w = np.where(degenerate, np.nan, w)
        ps = np.where(degenerate, np.nan, ps)
    else:
        w = np.full(len(y), np.nan)
        ps = np.full(len(y), np.nan)
    return FitBatch(t_stat, p, w, ps, degenerate, k - 1)


@dataclass(frozen=True)
class FitResult:
    increments: tuple[float, ...]
    t_stat: float
    df: int
    p_fit: float
    w_stat: float | None
    p_shapiro: float | None
    normality_ok: bool
    shapiro_threshold: float = SHAPIRO_THRESHOLD
    warnings: tuple[str, ...] = ()
    verdicts: dict = field(default_factory=dict)

    def verdict_at(self, alpha: float) -> str:
        return SELECTION if self.p_fit < alpha else NOT_REJECTED

    @property
    def normality_tested(self) -> bool:
        return self.p_shapiro is not None


def frequency_increment_test(fs: FrequencySeries,
                             shapiro_threshold: float = SHAPIRO_THRESHOLD) -> FitResult:
    if len(fs) < 3:
        raise InsufficientData("the increment test needs at least 3 points")
    incs = rescale_increments(fs)
    batch = fit_batch(fs.t, np.asarray(fs.v)[None, :])
    if batch.degenerate[0]:
        raise DegenerateIncrements("all rescaled increments are identical; the series is untestable")
    k = len(incs)
    warnings = []
    if k < LOW_POWER_INCREMENTS:
        warnings.append("low-power")
    if k >= 3:
        w, ps = float(batch.w[0]), float(batch.p_shapiro[0])
        normality_ok = ps >= shapiro_threshold
    else:
        w = ps = None
        normality_ok = False
        warnings.append("normality-untested")
    p = float(batch.p_fit[0])
    return FitResult(
        increments=tuple(incs),
        t_stat=float(batch.t_stat[0]),
        df=batch.df,
        p_fit=p,
        w_stat=w,
        p_shapiro=ps,
        normality_ok=normality_ok,
        shapiro_threshold=shapiro_threshold,
        warnings=tuple(warnings),
        verdicts={a: (SELECTION if p < a else NOT_REJECTED) for a in ALPHA_LEVELS},
    )


@dataclass(frozen=True)
class VarianceDiagnostic:
    drift_term: float | None
    prev_sample_term: float
    cur_sample_term: float
    N_assumed: int | None = None

    @property
    def total(self) -> float:
        drift = self.drift_term or 0.0
        return drift + self.prev_sample_term + self.cur_sample_term


def increment_variance_terms(fs: FrequencySeries, N_assumed: int | None = None,
                             numerator: str = "derived") -> list[VarianceDiagnostic]:
    """Approximate variance of each rescaled increment, split into its parts.

    The three parts are drift (``1/N``, only when ``N_assumed`` is given) and
    the binomial sampling noise of the previous and current points.  With
    ``numerator="printed"`` the current-point term uses ``v_i (1 - v_{i-1})``
    instead of ``v_i (1 - v_i)``, for comparison with the published formula.
    """
    if numerator not in ("derived", "printed"):
        raise ValidationError("numerator must be 'derived' or 'printed'")
    if N_assumed is not None and N_assumed < 1:
        raise ValidationError("N_assumed must be positive")
    out = []
    for i in range(1, len(fs)):
        dt = fs.t[i] - fs.t[i - 1]
        v0, v1 = fs.v[i - 1], fs.v[i]
        m0, m1 = fs.token_total[i - 1], fs.token_total[i]
        num = v1 * (1 - v1) if numerator == "derived" else v1 * (1 - v0)
        out.append(VarianceDiagnostic(
            drift_term=None if N_assumed is None else 1.0 / N_assumed,
            prev_sample_term=1.0 / (m0 * dt),
            cur_sample_term=num / (m1 * dt * v0 * (1 - v0)),
            N_assumed=N_assumed,
        ))
    return out


def coefficient_of_variation(values) -> float:
    arr = np.asarray(values, dtype=float)
    return float(arr.std(ddof=1) / arr.mean())
