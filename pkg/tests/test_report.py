import math

import numpy as np
import pytest

from fitdrift.binning import FixedWidth, NoBinning, VariableWidth, bin_counts, to_frequency_series
from fitdrift.data import light_past
from fitdrift.errors import ValidationError
from fitdrift.fit import frequency_increment_test
from fitdrift.report import (
    DEFAULT_STRATEGIES,
    GOLD,
    LIGHT_BLUE,
    ORANGE,
    ROBUST_DRIFT,
    ROBUST_SELECTION,
    SENSITIVE,
    UNDETERMINED,
    RunManifest,
    classify,
    parse_strategy,
    robustness_report,
)
from fitdrift.series import CountSeries
from fitdrift.wright_fisher import WFConfig, simulate, trajectory_to_counts


def logistic_counts(seed, size=1000, generations=200, start=0.05, s=0.04):
    """Binomial token counts around the deterministic selection curve."""
    rng = np.random.default_rng(seed)
    t = np.arange(generations)
    v = 1 / (1 + np.exp(-(math.log1p(s) * t + math.log(start / (1 - start)))))
    a = rng.binomial(size, v)
    return CountSeries.from_rows([(1810 + i, int(x), int(size - x)) for i, x in enumerate(a)])


def drift_counts(seed, size=100):
    rng = np.random.default_rng(seed)
    traj = simulate(WFConfig(N=1000, s=0.0, generations=200), rng)
    return trajectory_to_counts(traj, np.full(200, size), rng)


def test_classification_thresholds():
    assert classify(0.049) == ORANGE
    assert classify(0.05) == GOLD
    assert classify(0.1999) == GOLD
    assert classify(0.2) == LIGHT_BLUE
    assert classify(0.3, cuts=(0.1, 0.5)) == GOLD


def test_parse_strategy():
    assert parse_strategy("c=1.5") == VariableWidth(1.5)
    assert parse_strategy("10y", 5) == FixedWidth(10, 5)
    assert parse_strategy("none") == NoBinning()
    for bad in ("c=x", "y", "weekly"):
        with pytest.raises(ValidationError):
            parse_strategy(bad)


def test_default_strategies_count():
    assert len(DEFAULT_STRATEGIES) == 13
    assert len({s.label for s in DEFAULT_STRATEGIES}) == 13


def test_report_reuses_fit_numbers():
    cs = light_past()
    rep = robustness_report(cs)
    assert len(rep.rows) == len(DEFAULT_STRATEGIES)
    for spec, row in zip(DEFAULT_STRATEGIES, rep.rows):
        res = frequency_increment_test(to_frequency_series(bin_counts(cs, spec)))
        assert row.p_fit == res.p_fit and row.p_shapiro == res.p_shapiro
        assert (row.cls == ORANGE) == (res.verdict_at(0.05) == "selection-flagged")
    c1 = next(r for r in rep.rows if r.strategy == "c=1")
    assert c1.n_bins == 10


def test_median_ratio_counts_occupied_years():
    cs = CountSeries.from_rows([(1900, 5, 5), (1901, 0, 0), (1902, 5, 6), (1903, 7, 3), (1904, 2, 9)])
    rep = robustness_report(cs, [FixedWidth(2, 1)])
    # windows 1900-01 (1 occupied year), 1902-03 (2), 1904-05 (1)
    assert rep.rows[0].median_bin_year_ratio == 1.0


def test_insufficient_data_rows_are_kept():
    cs = CountSeries.from_rows([(1900 + i, 3, 2) for i in range(6)])
    rep = robustness_report(cs, [FixedWidth(5, 10), NoBinning(1)])
    assert rep.rows[0].status == "insufficient-data" and rep.rows[0].p_fit is None
    assert "insufficient-data" in rep.to_csv()
    assert rep.rows[1].status in ("ok", "degenerate")


def test_verdict_undetermined_without_eligible_rows():
    cs = CountSeries.from_rows([(1900 + i, 3, 2) for i in range(6)])
    assert robustness_report(cs, [FixedWidth(5, 10)]).verdict == UNDETERMINED


def test_csv_layout():
    text = robustness_report(light_past(), [VariableWidth(1.0)]).to_csv()
    lines = text.splitlines()
    assert lines[0] == "strategy,n_bins,median_bin_year_ratio,p_fit,p_shapiro,class,normality_ok,status"
    assert lines[1].startswith("c=1,10,")


@pytest.mark.parametrize("seed", range(10))
def test_strong_selection_is_robust(seed):
    rep = robustness_report(logistic_counts(seed))
    assert rep.verdict == ROBUST_SELECTION
    assert all(r.cls == ORANGE for r in rep.rows)


def test_drift_rows_are_mostly_light_blue():
    eligible = light_blue = 0
    selection = 0
    for seed in range(20):
        rep = robustness_report(drift_counts(seed))
        selection += rep.verdict == ROBUST_SELECTION
        for r in rep.rows:
            if r.status == "ok" and r.normality_ok:
                eligible += 1
                light_blue += r.cls == LIGHT_BLUE
    assert light_blue / eligible > 0.6
    assert selection <= 2


@pytest.mark.xfail(strict=True, reason="under drift each binned strategy independently risks p < 0.2, "
                                       "so unanimous light blue is a coin flip (about half of runs)")
def test_drift_verdict_large_majority():
    verdicts = [robustness_report(drift_counts(seed)).verdict for seed in range(20)]
    assert verdicts.count(ROBUST_DRIFT) >= 14


def test_sparse_counts_fail_normality_unbinned():
    fails = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        traj = simulate(WFConfig(N=1000, s=0.0, generations=200, start_fraction=0.1), rng)
        rep = robustness_report(trajectory_to_counts(traj, rng.poisson(12, 200), rng))
        row = next(r for r in rep.rows if r.strategy == "none")
        fails += row.status == "ok" and not row.normality_ok
    assert fails >= 8


def test_sensitive_verdict_on_light_fixture():
    assert robustness_report(light_past()).verdict == SENSITIVE


def test_manifest_text():
    m = RunManifest("sweep", {"preset": "fig4", "fast": True, "seed": 42, "out": None}, [], ["grid.csv"], seed=42)
    text = m.to_text()
    assert "fast = true\n" in text and "preset = fig4\n" in text and "out = \n" in text
    assert "manifest.outputs = grid.csv" in text and "manifest.version = " in text
