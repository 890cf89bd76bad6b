"""Haploid Wright-Fisher simulation with selection, binning and downsampling.

Each generation all ``N`` individuals are redrawn; an individual is a mutant
with probability ``n(1+s) / (n(1+s) + N - n)`` where ``n`` is the current
mutant count.  Both scalar (one trajectory) and batch (a replicates x
generations matrix) entry points are provided; the batch forms are what the
sweep harness uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBinning, ValidationError
from .series import CountSeries, FrequencySeries


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class WFConfig:
    N: int = 1000
    s: float = 0.0
    generations: int = 200
    start_fraction: float = 0.5

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError("N must be positive")
        if self.s < 0 or not math.isfinite(self.s):
            raise ValidationError("s must be a finite non-negative number")
        if self.generations < 1:
            raise ValidationError("generations must be positive")
        if not 0.0 <= self.start_fraction <= 1.0:
            raise ValidationError("start_fraction must lie in [0, 1]")

    @property
    def start_count(self) -> int:
        # round half up
        return int(math.floor(self.start_fraction * self.N + 0.5))


@dataclass(frozen=True)
class Trajectory:
    N: int
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if any(c < 0 or c > self.N for c in counts):
            raise ValidationError("counts must lie in [0, N]")

    @property
    def generations(self) -> int:
        return len(self.counts)

    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.N


def mutant_probability(n, N: int, s: float):
    """Probability that an offspring is a mutant given ``n`` mutants."""
    n = np.asarray(n, dtype=float)
    fit = n * (1.0 + s)
    return fit / (fit + (N - n))


def wf_step(n_t: int, N: int, s: float, rng) -> int:
    if not 0 <= n_t <= N:
        raise ValidationError("n_t must lie in [0, N]")
    if n_t == 0 or n_t == N:
        return n_t
    q = float(mutant_probability(n_t, N, s))
    return int(as_rng(rng).binomial(N, q))


def simulate(cfg: WFConfig, rng) -> Trajectory:
    rng = as_rng(rng)
    counts = [cfg.start_count]
    for _ in range(cfg.generations - 1):
        counts.append(wf_step(counts[-1], cfg.N, cfg.s, rng))
    return Trajectory(cfg.N, tuple(counts))


def simulate_batch(cfg: WFConfig, replicates: int, rng) -> np.ndarray:
    """``replicates x generations`` matrix of mutant counts."""
    rng = as_rng(rng)
    out = np.empty((replicates, cfg.generations), dtype=np.int64)
    n = np.full(replicates, cfg.start_count, dtype=np.int64)
    out[:, 0] = n
    for g in range(1, cfg.generations):
        q = mutant_probability(n, cfg.N, cfg.s)
        # q is exactly 0 or 1 at the absorbing states, so binomial returns n
        n = rng.binomial(cfg.N, q)
        out[:, g] = n
    return out


def block_edges(generations: int, n_bins: int) -> list[tuple[int, int]]:
    """Half-open ``[start, stop)`` blocks; the last block takes the remainder."""
    if n_bins < 1 or n_bins > generations:
        raise InvalidBinning(f"cannot split {generations} generations into {n_bins} bins")
    length = generations // n_bins
    edges = [(i * length, (i + 1) * length) for i in range(n_bins - 1)]
    edges.append(((n_bins - 1) * length, generations))
    return edges


def block_sums(values: np.ndarray, n_bins: int) -> np.ndarray:
    """Sum the columns of a 2-D array within each block."""
    values = np.asarray(values)
    edges = block_edges(values.shape[1], n_bins)
    starts = np.array([a for a, _ in edges])
    return np.add.reduceat(values, starts, axis=1)


def block_midpoints(generations: int, n_bins: int) -> np.ndarray:
    return np.array([(a + b - 1) / 2 for a, b in block_edges(generations, n_bins)])


def smoothed_frequency(successes, totals) -> np.ndarray:
    """Array form of Laplace smoothing followed by ``a / (a + b)``."""
    successes = np.asarray(successes, dtype=float)
    failures = np.asarray(totals, dtype=float) - successes
    if np.any(successes + failures < 1):
        raise ValidationError("every point needs at least one token")
    a = np.where(successes == 0, 1.0, successes)
    b = np.where(failures == 0, 1.0, failures)
    return a / (a + b)


def bin_trajectory(traj: Trajectory, n_bins: int) -> FrequencySeries:
    if n_bins < 2 or n_bins > traj.generations:
        raise InvalidBinning(f"n_bins must lie in [2, {traj.generations}], got {n_bins}")
    counts = np.asarray(traj.counts, dtype=np.int64)[None, :]
    sums = block_sums(counts, n_bins)[0]
    totals = traj.N * np.diff([a for a, _ in block_edges(traj.generations, n_bins)] + [traj.generations])
    v = smoothed_frequency(sums, totals)
    t = block_midpoints(traj.generations, n_bins)
    return FrequencySeries(tuple(t), tuple(v), tuple(int(m) for m in totals))


@dataclass(frozen=True)
class SamplingPlan:
    sizes: tuple[int, ...]
    sigma_s: float
    target_mean: int
    realized_sigma: float

    def sigma_matches(self, rel_tol: float = 0.25) -> bool:
        """False when truncation has pulled the spread of ln(sizes) away from sigma_s."""
        if self.sigma_s == 0:
            return self.realized_sigma <= 1e-12
        return abs(self.realized_sigma - self.sigma_s) <= rel_tol * self.sigma_s


def lognormal_size_matrix(M: int, sigma_s: float, shape, N: int, rng) -> np.ndarray:
    if not 1 <= M <= N:
        raise ValidationError("need 1 <= M <= N")
    if sigma_s < 0:
        raise ValidationError("sigma_s must be non-negative")
    rng = as_rng(rng)
    if sigma_s == 0:
        return np.full(shape, M, dtype=np.int64)
    draws = rng.lognormal(mean=math.log(M), sigma=sigma_s, size=shape)
    return np.clip(np.rint(draws), 1, N).astype(np.int64)


def realized_sigma(sizes: np.ndarray) -> np.ndarray:
    logs = np.log(np.asarray(sizes, dtype=float))
    return logs.std(axis=-1, ddof=1)


def lognormal_sizes(M: int, sigma_s: float, generations: int, N: int, rng) -> SamplingPlan:
    sizes = lognormal_size_matrix(M, sigma_s, generations, N, rng)
    return SamplingPlan(tuple(int(x) for x in sizes), sigma_s, M, float(realized_sigma(sizes)))


def sample_matrix(counts: np.ndarray, N: int, sizes: np.ndarray, rng,
                  method: str = "hypergeometric") -> np.ndarray:
    """Number of mutants seen when ``sizes`` individuals are drawn per generation."""
    rng = as_rng(rng)
    counts = np.asarray(counts, dtype=np.int64)
    sizes = np.asarray(sizes, dtype=np.int64)
    if method == "hypergeometric":
        return rng.hypergeometric(counts, N - counts, sizes)
    if method == "binomial":
        return rng.binomial(sizes, counts / N)
    raise ValidationError(f"unknown sampling method {method!r}")


def downsample(traj: Trajectory, plan: SamplingPlan, rng,
               method: str = "hypergeometric") -> FrequencySeries:
    if len(plan.sizes) != traj.generations:
        raise ValidationError("sampling plan length must equal trajectory length")
    sizes = np.asarray(plan.sizes, dtype=np.int64)
    if np.any(sizes > traj.N) or np.any(sizes < 1):
        raise ValidationError("sample sizes must lie in [1, N]")
    k = sample_matrix(np.asarray(traj.counts), traj.N, sizes, rng, method)
    v = smoothed_frequency(k, sizes)
    t = np.arange(traj.generations, dtype=float)
    return FrequencySeries(tuple(t), tuple(v), tuple(int(m) for m in sizes))


def trajectory_to_counts(traj: Trajectory, sizes, rng, start_year: int = 1810,
                         method: str = "binomial") -> CountSeries:
    """Yearly two-variant token counts observed from a trajectory.

    Useful for building synthetic corpus-like count series; with binomial
    sampling the yearly totals may exceed ``N``.
    """
    sizes = np.asarray(sizes, dtype=np.int64)
    if sizes.shape != (traj.generations,):
        raise ValidationError("need one sample size per generation")
    if method == "binomial":
        k = as_rng(rng).binomial(sizes, np.asarray(traj.counts) / traj.N)
    else:
        k = sample_matrix(np.asarray(traj.counts), traj.N, sizes, rng, method)
    rows = [(start_year + i, int(a), int(m - a)) for i, (a, m) in enumerate(zip(k, sizes))]
    return CountSeries.from_rows(rows)
