"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

All Monte-Carlo criteria run the full 1000 replicates with the master seed
fixed below before any result was looked at.  Run standalone with
``python tests/test_acceptance.py`` for just the summary lines.
"""

import math
import subprocess
import sys

import mpmath
import numpy as np
import pytest
import scipy.stats

from fitdrift.binning import variable_width_bin
from fitdrift.data import light_past
from fitdrift.fit import frequency_increment_test
from fitdrift.numerics import shapiro_wilk, shapiro_wilk_batch, t_two_sided_p
from fitdrift.series import FrequencySeries
from fitdrift.sweep import HeteroConfig, SweepConfig, run_grid, run_hetero_sweep, run_length_sweep

SEED = 12345
REPS = 1000
SIX_T = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
SIX_V = (0.1, 0.2, 0.35, 0.5, 0.65, 0.8)
# classic worked example for the W statistic (weights of 11 men, lb)
WEIGHTS = (148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236)


def report(capsys, number: int, ok: bool, detail: str):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def _unbinned_and_100(s_grid):
    cfg = SweepConfig(s_grid=s_grid, bin_counts=(200, 100), replicates=REPS, master_seed=SEED)
    return run_grid(cfg)


def check_1(capsys=None):
    grid = _unbinned_and_100((0.0,))
    share = grid.cell(s=0.0, n_bins=200).pct_p_below_alpha_all
    return report(capsys, 1, 0.03 <= share <= 0.07, f"unbinned drift share {share:.3f}, band [0.03, 0.07]")


def check_2(capsys=None):
    grid = _unbinned_and_100((0.0, 0.01))
    ok = True
    parts = []
    for s in (0.0, 0.01):
        base = grid.cell(s=s, n_bins=200).pct_p_below_alpha_all
        binned = grid.cell(s=s, n_bins=100).pct_p_below_alpha_all
        gain = binned - base
        ok &= gain >= 0.05
        parts.append(f"s={s:g}: {base:.3f} -> {binned:.3f}, +{100 * gain:.1f} pp")
    return report(capsys, 2, ok, "; ".join(parts) + "; need >= +5 pp each")


def check_3(capsys=None):
    cfg = SweepConfig(s_grid=(0.04,), bin_counts=(200, 20, 10), replicates=REPS,
                      start_fraction=0.05, master_seed=SEED)
    grid = run_grid(cfg)
    shares = [grid.cell(s=0.04, n_bins=b).pct_p_below_alpha_all for b in (200, 20, 10)]
    spread = max(shares) - min(shares)
    ok = min(shares) >= 0.75 and spread <= 0.10
    return report(capsys, 3, ok, f"shares {', '.join(f'{x:.3f}' for x in shares)}, spread {spread:.3f}")


def check_4(capsys=None):
    cfg = SweepConfig(s_grid=(0.1,), bin_counts=(10,), replicates=REPS, start_fraction=0.05, master_seed=SEED)
    share = run_grid(cfg).cell(s=0.1, n_bins=10).pct_p_below_alpha_all
    return report(capsys, 4, share <= 0.10, f"s=0.1, 10 bins share {share:.3f}, need <= 0.10")


def check_5(capsys=None):
    cfg = SweepConfig(s_grid=(0.0,), bin_counts=(200,), replicates=REPS, master_seed=SEED)
    grid = run_length_sweep(cfg, lengths=(4, 10, 50, 200))
    shares = {n: grid.cell(s=0.0, length=n).pct_p_below_alpha_all for n in (4, 10, 50, 200)}
    ok = all(0.03 - 0.015 <= x <= 0.07 + 0.015 for x in shares.values())
    return report(capsys, 5, ok, ", ".join(f"L={n}: {x:.3f}" for n, x in shares.items()) + ", band [0.015, 0.085]")


def check_6(capsys=None):
    sigmas = (0.0, math.log(1.5), math.log(2.0))
    cfg = SweepConfig(s_grid=(0.0,), bin_counts=(200,), replicates=REPS, master_seed=SEED)
    hcfg = HeteroConfig(M_grid=(100,), sigma_grid=sigmas, N_set=(1000,), bin_counts=(15,))
    grid = run_hetero_sweep(cfg, hcfg)
    shares = [grid.cell(N=1000, M=100, sigma=s, n_bins=15).pct_p_below_alpha_all for s in sigmas]
    worst = max(shares[1:]) - shares[0]
    return report(capsys, 6, worst < 0.03,
                  f"shares at sigma 0, ln1.5, ln2: {', '.join(f'{x:.3f}' for x in shares)}; "
                  f"max excess {100 * worst:+.1f} pp, need < 3 pp")


def check_7(capsys=None):
    bc = variable_width_bin(light_past(), 1.0)
    first = bc.bins[0].total
    ok = len(bc) == 10 and abs(first - 886.9) <= 0.05 * 886.9
    return report(capsys, 7, ok, f"{len(bc)} bins, first bin {first} tokens ({bc.bins[0].year_start}-{bc.bins[0].year_end})")


def _oracle_p(v, t):
    mpmath.mp.dps = 50
    v = [mpmath.mpf(str(x)) for x in v]
    t = [mpmath.mpf(str(x)) for x in t]
    y = [(v[i] - v[i - 1]) / mpmath.sqrt(2 * v[i - 1] * (1 - v[i - 1]) * (t[i] - t[i - 1])) for i in range(1, len(v))]
    k = len(y)
    mean = sum(y) / k
    sd = mpmath.sqrt(sum((x - mean) ** 2 for x in y) / (k - 1))
    stat = mean / (sd / mpmath.sqrt(k))
    df = k - 1
    dens = lambda x: mpmath.gamma((df + 1) / mpmath.mpf(2)) / (mpmath.sqrt(df * mpmath.pi) * mpmath.gamma(df / mpmath.mpf(2))) \
        * (1 + x ** 2 / df) ** (-(df + 1) / mpmath.mpf(2))
    return float(2 * mpmath.quad(dens, [abs(stat), mpmath.inf]))


def check_8(capsys=None):
    fs = FrequencySeries(SIX_T, SIX_V, (100,) * 6)
    res = frequency_increment_test(fs)
    err = abs(res.p_fit - _oracle_p(SIX_V, SIX_T))
    p_zero = t_two_sided_p(0.0, 4)
    swap = abs(frequency_increment_test(fs.flipped()).p_fit - res.p_fit)
    scaled = FrequencySeries(tuple(3.5 * x - 7.0 for x in SIX_T), SIX_V, (100,) * 6)
    rescale = abs(frequency_increment_test(scaled).p_fit - res.p_fit)
    ok = err <= 1e-9 and p_zero == 1.0 and swap <= 1e-12 and rescale <= 1e-12
    return report(capsys, 8, ok, f"oracle error {err:.1e}, p(t=0)={p_zero}, label swap {swap:.1e}, time rescale {rescale:.1e}")


def check_9(capsys=None):
    x = np.array(WEIGHTS, dtype=float)
    w0, p0 = shapiro_wilk(x)
    w1, p1 = shapiro_wilk(-2.5 * x + 1e3)
    affine = max(abs(w0 - w1), abs(p0 - p1))
    samples = np.random.default_rng(SEED).standard_normal((10_000, 20))
    _, ps = shapiro_wilk_batch(samples)
    ks = scipy.stats.kstest(ps, "uniform").statistic
    ref = scipy.stats.shapiro(x)
    cert = max(abs(w0 - ref.statistic), abs(p0 - ref.pvalue))
    ok = affine <= 1e-12 and ks <= 0.02 and cert <= 1e-4 and round(w0, 2) == 0.79
    return report(capsys, 9, ok, f"affine {affine:.1e}, KS {ks:.4f} (need <= 0.02), reference W={w0:.4f} p={p0:.4f}, error {cert:.1e}")


def check_10(capsys=None, tmp=None):
    outs = []
    for workers in (1, 2):
        out = tmp / f"w{workers}"
        cmd = [sys.executable, "-m", "fitdrift.cli", "sweep", "--preset", "fig4", "--fast", "--seed", "42",
               "--workers", str(workers), "--no-svg", "--out", str(out)]
        subprocess.run(cmd, check=True, capture_output=True)
        outs.append((out / "grid.csv").read_bytes())
    same = outs[0] == outs[1]
    return report(capsys, 10, same, f"grid.csv {len(outs[0])} bytes, identical across 1 and 2 workers: {same}")


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number, capsys):
    assert globals()[f"check_{number}"](capsys)


def test_criterion_10(capsys, tmp_path):
    assert check_10(capsys, tmp_path)


if __name__ == "__main__":
    import pathlib
    import tempfile

    results = [globals()[f"check_{n}"]() for n in range(1, 10)]
    with tempfile.TemporaryDirectory() as d:
        results.append(check_10(tmp=pathlib.Path(d)))
    sys.exit(0 if all(results) else 1)
