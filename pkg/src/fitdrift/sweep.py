"""Monte-Carlo campaigns over selection strength, binning, length and sampling noise.

Randomness is derived from a master seed with :class:`numpy.random.SeedSequence`
spawn keys, so every cell's result depends only on the configuration and its
own grid coordinates.  Cells can therefore be evaluated in any order and by
any number of worker processes without changing a single output byte.
"""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from . import __version__
from .errors import ValidationError
from .fit import fit_batch
from .wright_fisher import (
    WFConfig,
    block_edges,
    block_midpoints,
    block_sums,
    lognormal_size_matrix,
    realized_sigma,
    sample_matrix,
    simulate_batch,
    smoothed_frequency,
)

NA = "NA"
MASK_FRACTION = 0.1
SIGMA_REL_TOL = 0.25
# constant sizes give a log spread of ~1e-16, not exactly 0
SIGMA_ZERO_TOL = 1e-12
STAT_COLUMNS = (
    "pct_lt_alpha_all",
    "pct_lt_alpha_filtered",
    "mean_p_all",
    "mean_p_filtered",
    "pct_norm_pass",
    "pct_degenerate",
)
# bins and s range reported for the original verb analysis (6 to 13 bins)
ORIGINAL_REGION = {"n_bins_min": 6, "n_bins_max": 13, "s_min": 0.001, "s_max": 5.0}


def default_s_grid() -> tuple[float, ...]:
    return (0.0,) + tuple(float(s) for s in np.geomspace(0.001, 5.0, 200))


def bin_counts_from_lengths(generations: int = 200, lengths: Sequence[int] = range(1, 51)) -> tuple[int, ...]:
    counts = {math.ceil(generations / length) for length in lengths}
    return tuple(sorted(counts, reverse=True))


def default_lengths() -> tuple[int, ...]:
    return tuple(sorted({int(x) for x in np.rint(np.geomspace(4, 200, 20))}))


def rng_for(master_seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for a grid coordinate (SeedSequence spawn key)."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in keys)))


def _stream_id(*parts) -> int:
    return zlib.crc32(repr(parts).encode())


@dataclass(frozen=True)
class SweepConfig:
    s_grid: tuple[float, ...] = field(default_factory=default_s_grid)
    bin_counts: tuple[int, ...] = field(default_factory=bin_counts_from_lengths)
    replicates: int = 1000
    N: int = 1000
    generations: int = 200
    start_fraction: float = 0.5
    fit_alpha: float = 0.05
    shapiro_alpha: float = 0.1
    master_seed: int = 0
    showcase_bins: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "s_grid", tuple(float(s) for s in self.s_grid))
        object.__setattr__(self, "bin_counts", tuple(int(b) for b in self.bin_counts))
        object.__setattr__(self, "showcase_bins", tuple(int(b) for b in self.showcase_bins))
        if not self.s_grid or not self.bin_counts:
            raise ValidationError("s_grid and bin_counts must be non-empty")
        if self.replicates < 1:
            raise ValidationError("replicates must be >= 1")
        for b in self.bin_counts:
            if not 3 <= b <= self.generations:
                raise ValidationError(f"bin count {b} outside [3, {self.generations}]")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValidationError("master_seed must be an unsigned 64-bit integer")
        WFConfig(self.N, max(self.s_grid), self.generations, self.start_fraction)

    def wf(self, s: float, generations: int | None = None, N: int | None = None) -> WFConfig:
        return WFConfig(N or self.N, s, generations or self.generations, self.start_fraction)

    def stream(self) -> int:
        return _stream_id(self.N, self.generations, self.start_fraction)


@dataclass(frozen=True)
class CellResult:
    key: tuple[tuple[str, float], ...]
    replicates: int
    pct_p_below_alpha_all: float
    pct_p_below_alpha_filtered: float | None
    mean_p_all: float
    mean_p_filtered: float | None
    pct_normality_pass: float
    pct_degenerate: float
    extra: tuple[tuple[str, float], ...] = ()
    p_values: tuple[float, ...] | None = None
    p_shapiro: tuple[float, ...] | None = None

    def __getitem__(self, name):
        return dict(self.key + self.extra)[name]

    @property
    def s(self) -> float:
        return dict(self.key)["s"]

    @property
    def n_bins(self) -> int:
        return int(dict(self.key)["n_bins"])

    @property
    def masked(self) -> bool:
        return self.pct_p_below_alpha_filtered is None


def summarize(key, p_fit, p_sw, degenerate, alpha, shapiro_alpha, replicates,
              include=None, extra=(), keep_pvalues=False) -> CellResult:
    """Aggregate per-replicate test outcomes into one cell.

    ``include`` marks replicates that count at all (the heteroskedasticity
    sweep excludes replicates whose realised size spread is off).  Degenerate
    replicates are excluded from every share and reported on their own.
    """
    include = np.ones(len(p_fit), dtype=bool) if include is None else include
    usable = include & ~degenerate
    n_usable = int(usable.sum())
    sig = usable & (p_fit < alpha)
    passing = usable & (np.nan_to_num(p_sw, nan=-1.0) >= shapiro_alpha)
    n_pass = int(passing.sum())
    nan = float("nan")
    pct_all = sig.sum() / n_usable if n_usable else nan
    mean_all = float(p_fit[usable].mean()) if n_usable else nan
    masked = n_pass < MASK_FRACTION * replicates or n_pass == 0
    pct_f = None if masked else float((sig & passing).sum() / n_pass)
    mean_f = None if masked else float(p_fit[passing].mean())
    return CellResult(
        key=tuple(key),
        replicates=replicates,
        pct_p_below_alpha_all=float(pct_all),
        pct_p_below_alpha_filtered=pct_f,
        mean_p_all=mean_all,
        mean_p_filtered=mean_f,
        pct_normality_pass=float(n_pass / n_usable) if n_usable else nan,
        pct_degenerate=float(degenerate.sum() / replicates),
        extra=tuple(extra),
        p_values=tuple(float(p) for p in p_fit) if keep_pvalues else None,
        p_shapiro=tuple(float(p) for p in p_sw) if keep_pvalues else None,
    )


def binned_frequencies(successes: np.ndarray, totals: np.ndarray, n_bins: int):
    """Block-sum counts and smooth them; returns (time midpoints, frequency matrix)."""
    generations = successes.shape[1]
    a = block_sums(successes, n_bins)
    m = block_sums(np.broadcast_to(totals, successes.shape), n_bins)
    return block_midpoints(generations, n_bins), smoothed_frequency(a, m)


def evaluate_bins(counts: np.ndarray, N: int, n_bins: int):
    totals = np.full(counts.shape, N, dtype=np.int64)
    t, v = binned_frequencies(counts, totals, n_bins)
    return fit_batch(t, v)


def run_cell(s: float, n_bins: int, cfg: SweepConfig, cell_seed: int) -> CellResult:
    """Simulate ``cfg.replicates`` trajectories, bin them and test each one."""
    counts = simulate_batch(cfg.wf(s), cfg.replicates, np.random.default_rng(cell_seed))
    fb = evaluate_bins(counts, cfg.N, n_bins)
    return summarize((("s", s), ("n_bins", n_bins)), fb.p_fit, fb.p_shapiro, fb.degenerate,
                     cfg.fit_alpha, cfg.shapiro_alpha, cfg.replicates,
                     keep_pvalues=n_bins in cfg.showcase_bins)


def _grid_row(args) -> list[CellResult]:
    cfg, s_index = args
    s = cfg.s_grid[s_index]
    # one batch of trajectories per s, binned every way
    counts = simulate_batch(cfg.wf(s), cfg.replicates, rng_for(cfg.master_seed, cfg.stream(), s_index))
    cells = []
    for n_bins in cfg.bin_counts:
        fb = evaluate_bins(counts, cfg.N, n_bins)
        cells.append(summarize((("s", s), ("n_bins", n_bins)), fb.p_fit, fb.p_shapiro, fb.degenerate,
                               cfg.fit_alpha, cfg.shapiro_alpha, cfg.replicates,
                               keep_pvalues=n_bins in cfg.showcase_bins))
    return cells


def _length_row(args) -> list[CellResult]:
    cfg, s_index, lengths = args
    s = cfg.s_grid[s_index]
    counts = simulate_batch(cfg.wf(s, generations=max(lengths)), cfg.replicates,
                            rng_for(cfg.master_seed, cfg.stream(), 1, s_index))
    cells = []
    for length in lengths:
        fb = evaluate_bins(counts[:, :length], cfg.N, length)
        cells.append(summarize((("s", s), ("length", length)), fb.p_fit, fb.p_shapiro, fb.degenerate,
                               cfg.fit_alpha, cfg.shapiro_alpha, cfg.replicates))
    return cells


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


@dataclass(frozen=True)
class GridResult:
    kind: str
    key_columns: tuple[str, ...]
    cells: tuple[CellResult, ...]
    config: dict
    extra_columns: tuple[str, ...] = ()
    annotations: dict = field(default_factory=dict)
    version: str = __version__

    def __len__(self) -> int:
        return len(self.cells)

    def cell(self, **coords) -> CellResult:
        for c in self.cells:
            keys = dict(c.key)
            if all(math.isclose(keys[k], v, rel_tol=0, abs_tol=1e-15) for k, v in coords.items()):
                return c
        raise KeyError(coords)

    def to_csv(self) -> str:
        lines = [",".join(self.key_columns + STAT_COLUMNS + self.extra_columns)]
        for c in self.cells:
            keys = dict(c.key)
            extra = dict(c.extra)
            fields = [_fmt(keys[k]) for k in self.key_columns]
            fields += [
                _fmt(c.pct_p_below_alpha_all),
                _fmt(c.pct_p_below_alpha_filtered),
                _fmt(c.mean_p_all),
                _fmt(c.mean_p_filtered),
                _fmt(c.pct_normality_pass),
                _fmt(c.pct_degenerate),
            ]
            fields += [_fmt(extra[k]) for k in self.extra_columns]
            lines.append(",".join(fields))
        return "\n".join(lines) + "\n"

    def pvalues_csv(self) -> str:
        """Raw per-replicate p-values for the showcased cells."""
        cols = self.key_columns + ("replicate", "p_fit", "p_shapiro")
        lines = [",".join(cols)]
        for c in self.cells:
            if c.p_values is None:
                continue
            keys = [_fmt(dict(c.key)[k]) for k in self.key_columns]
            for i, (p, ps) in enumerate(zip(c.p_values, c.p_shapiro)):
                lines.append(",".join(keys + [str(i), _fmt(p), _fmt(ps)]))
        return "\n".join(lines) + "\n"

    def config_echo(self) -> str:
        items = dict(self.config)
        items["kind"] = self.kind
        items["version"] = self.version
        for k, v in self.annotations.items():
            items[f"annotation.{k}"] = v
        return "".join(f"{k} = {_fmt_value(v)}\n" for k, v in sorted(items.items()))


def _fmt(x) -> str:
    if x is None:
        return NA
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return NA
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _fmt_value(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) if not isinstance(x, str) else x for x in v)
    if isinstance(v, dict):
        return ";".join(f"{k}:{_fmt(x)}" for k, x in v.items())
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, float, np.integer, np.floating)):
        return _fmt(v)
    return str(v)


def _config_dict(cfg: SweepConfig, **more) -> dict:
    d = asdict(cfg)
    d.update(more)
    return d


def run_grid(cfg: SweepConfig, workers: int = 1) -> GridResult:
    tasks = [(cfg, i) for i in range(len(cfg.s_grid))]
    rows = _map(_grid_row, tasks, workers)
    cells = tuple(c for row in rows for c in row)
    return GridResult("grid", ("s", "n_bins"), cells, _config_dict(cfg),
                      annotations={"original_region": dict(ORIGINAL_REGION)})


def run_length_sweep(cfg: SweepConfig, lengths: Sequence[int] = None, workers: int = 1) -> GridResult:
    """Unbinned series of several lengths; each length is the prefix of one run."""
    lengths = tuple(int(x) for x in (lengths if lengths is not None else default_lengths()))
    for length in lengths:
        if length < 4:
            raise ValidationError(f"series length {length} is below the minimum of 4")
    if max(lengths) > 10 ** 6:
        raise ValidationError("series length too large")
    tasks = [(cfg, i, lengths) for i in range(len(cfg.s_grid))]
    rows = _map(_length_row, tasks, workers)
    cells = tuple(c for row in rows for c in row)
    return GridResult("length", ("s", "length"), cells, _config_dict(cfg, lengths=lengths))


@dataclass(frozen=True)
class HeteroConfig:
    M_grid: tuple[int, ...] = (10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)
    sigma_grid: tuple[float, ...] = tuple(float(np.log(x)) for x in np.linspace(1.0, 2.0, 11))
    N_set: tuple[int, ...] = (1000, 10000)
    bin_counts: tuple[int, ...] = (200, 40, 15)
    sampling: str = "hypergeometric"
    sigma_rel_tol: float = SIGMA_REL_TOL

    def __post_init__(self):
        for name in ("M_grid", "N_set", "bin_counts"):
            object.__setattr__(self, name, tuple(int(x) for x in getattr(self, name)))
        object.__setattr__(self, "sigma_grid", tuple(float(x) for x in self.sigma_grid))
        if any(x < 0 for x in self.sigma_grid):
            raise ValidationError("sigma values must be non-negative")
        if any(m < 1 for m in self.M_grid):
            raise ValidationError("sample sizes must be positive")


def _hetero_row(args) -> list[CellResult]:
    cfg, hcfg, n_index, m_index = args
    N = hcfg.N_set[n_index]
    M = hcfg.M_grid[m_index]
    counts = simulate_batch(cfg.wf(0.0, N=N), cfg.replicates, rng_for(cfg.master_seed, cfg.stream(), 2, n_index))
    shape = counts.shape
    cells = []
    for sigma_index, sigma in enumerate(hcfg.sigma_grid):
        rng = rng_for(cfg.master_seed, cfg.stream(), 3, n_index, m_index, sigma_index)
        sizes = lognormal_size_matrix(M, sigma, shape, N, rng)
        real = realized_sigma(sizes)
        if sigma == 0:
            matches = real <= SIGMA_ZERO_TOL
        else:
            matches = np.abs(real - sigma) <= hcfg.sigma_rel_tol * sigma
        k = sample_matrix(counts, N, sizes, rng, hcfg.sampling)
        for n_bins in hcfg.bin_counts:
            t, v = binned_frequencies(k, sizes, n_bins)
            fb = fit_batch(t, v)
            cells.append(summarize(
                (("N", N), ("M", M), ("sigma", sigma), ("n_bins", n_bins)),
                fb.p_fit, fb.p_shapiro, fb.degenerate, cfg.fit_alpha, cfg.shapiro_alpha,
                cfg.replicates, include=matches,
                extra=(("pct_sigma_mismatch", float(1.0 - matches.mean())),),
            ))
    return cells


def run_hetero_sweep(cfg: SweepConfig, hcfg: HeteroConfig = HeteroConfig(), workers: int = 1) -> GridResult:
    """Drift-only runs observed through samples of log-normally varying size.

    Combinations with ``M > N`` are skipped.  Replicates whose realised
    spread of log sample sizes misses ``sigma`` by more than the relative
    tolerance are excluded, then the usual normality filter applies.
    """
    for b in hcfg.bin_counts:
        if not 3 <= b <= cfg.generations:
            raise ValidationError(f"bin count {b} outside [3, {cfg.generations}]")
    tasks = [
        (cfg, hcfg, ni, mi)
        for ni, N in enumerate(hcfg.N_set)
        for mi, M in enumerate(hcfg.M_grid)
        if M <= N
    ]
    rows = _map(_hetero_row, tasks, workers)
    cells = tuple(c for row in rows for c in row)
    conf = _config_dict(replace(cfg, s_grid=(0.0,)), **{f"hetero.{k}": v for k, v in asdict(hcfg).items()})
    return GridResult("hetero", ("N", "M", "sigma", "n_bins"), cells, conf,
                      extra_columns=("pct_sigma_mismatch",))


FAST_REPLICATES = 200
SHOWCASE = (200, 100, 20, 10)


def preset(name: str, fast: bool = False, seed: int = 0) -> tuple[str, SweepConfig, dict]:
    """Named campaign: returns (kind, config, extra keyword arguments)."""
    reps = FAST_REPLICATES if fast else 1000
    base = dict(replicates=reps, master_seed=seed)
    if name == "fig3":
        return "grid", SweepConfig(s_grid=(0.0, 0.01), bin_counts=SHOWCASE, start_fraction=0.5,
                                   showcase_bins=SHOWCASE, **base), {}
    if name == "fig4":
        return "grid", SweepConfig(start_fraction=0.5, **base), {}
    if name == "fig5":
        return "grid", SweepConfig(s_grid=(0.04,), bin_counts=SHOWCASE, start_fraction=0.05,
                                   showcase_bins=SHOWCASE, **base), {}
    if name == "fig6":
        return "grid", SweepConfig(start_fraction=0.05, **base), {}
    if name == "s2":
        return "length", SweepConfig(start_fraction=0.5, bin_counts=(200,), **base), {"lengths": default_lengths()}
    if name == "s4":
        return "hetero", SweepConfig(s_grid=(0.0,), bin_counts=(200,), start_fraction=0.5, **base), {"hcfg": HeteroConfig()}
    raise ValidationError(f"unknown preset {name!r}")


PRESETS = ("fig3", "fig4", "fig5", "fig6", "s2", "s4")


def run_preset(name: str, fast: bool = False, seed: int = 0, workers: int = 1) -> GridResult:
    kind, cfg, kw = preset(name, fast, seed)
    return run_kind(kind, cfg, workers=workers, **kw)


def run_kind(kind: str, cfg: SweepConfig, workers: int = 1, **kw) -> GridResult:
    if kind == "grid":
        return run_grid(cfg, workers=workers)
    if kind == "length":
        return run_length_sweep(cfg, kw.get("lengths"), workers=workers)
    if kind == "hetero":
        return run_hetero_sweep(cfg, kw.get("hcfg", HeteroConfig()), workers=workers)
    raise ValidationError(f"unknown sweep kind {kind!r}")
