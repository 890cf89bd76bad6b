import subprocess
import sys

import pytest

from fitdrift.cli import dispatch, read_config
from fitdrift.data import light_past
from fitdrift.series import emit_counts_csv

SIX = "t,v,tokens\n1,0.1,100\n2,0.2,100\n3,0.35,100\n4,0.5,100\n5,0.65,100\n6,0.8,100\n"


@pytest.fixture
def six(tmp_path):
    p = tmp_path / "series.csv"
    p.write_text(SIX)
    return p


@pytest.fixture
def light(tmp_path):
    p = tmp_path / "light.csv"
    p.write_text(emit_counts_csv(light_past()))
    return p


def test_fit_prints_record(six, capsys):
    assert dispatch(["fit", "--input", str(six)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "p_fit,t_stat,df,w,p_shapiro,normality_ok,warnings"
    fields = out[1].split(",")
    assert len(fields) == 7 and fields[2] == "4" and float(fields[0]) < 0.05


def test_fit_with_output_dir(six, tmp_path, capsys):
    out = tmp_path / "fit"
    assert dispatch(["fit", "--input", str(six), "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"fit.csv", "series.csv", "increments.csv", "series.svg", "manifest.txt"}


def test_fit_on_counts_uses_strategy(light, capsys):
    assert dispatch(["fit", "--input", str(light), "--strategy", "variable", "--c", "1"]) == 0
    assert capsys.readouterr().out.splitlines()[1].split(",")[2] == "8"


def test_bin_variable(light, capsys):
    assert dispatch(["bin", "--strategy", "variable", "--c", "1", "--input", str(light)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "year_start,year_end,tokens_a,tokens_b"
    assert len(lines) == 11
    assert lines[1].startswith("1810,1863,")


def test_bin_fixed_to_file(light, tmp_path):
    out = tmp_path / "b.csv"
    assert dispatch(["bin", "--strategy", "fixed", "--width", "20", "--input", str(light), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 11
    assert (tmp_path / "b.csv.manifest").exists()


def test_exit_codes(six, tmp_path, capsys):
    assert dispatch(["fit", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert dispatch(["frobnicate"]) == 1
    assert dispatch(["fit"]) == 1
    assert dispatch(["fit", "--input", str(tmp_path / "missing.csv")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("t,v,tokens\n1,0.5,1\n2,1.5,1\n")
    assert dispatch(["fit", "--input", str(bad)]) == 1
    assert dispatch(["bin", "--input", str(six), "--strategy", "weekly"]) == 1
    assert dispatch(["simulate", "--N", "abc"]) == 1
    assert dispatch(["sweep", "--preset", "fig9"]) == 1


def test_config_file_and_override(light, tmp_path, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text(f"# comment\ninput = {light}\nstrategy = fixed\nwidth = 20\n")
    assert read_config(str(cfg))["width"] == "20"
    assert dispatch(["bin", "--config", str(cfg)]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 11
    assert dispatch(["bin", "--config", str(cfg), "--width", "50"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 5
    cfg.write_text("no equals sign\n")
    assert dispatch(["bin", "--config", str(cfg)]) == 1


def test_simulate_deterministic(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FITDRIFT_OUTDIR", str(tmp_path / "env"))
    assert dispatch(["simulate", "--N", "100", "--s", "0.05", "--generations", "40", "--seed", "3", "--bins", "8"]) == 0
    traj = tmp_path / "env" / "traj.csv"
    first = traj.read_bytes()
    assert first.startswith(b"generation,count\n0,50\n")
    assert len(first.decode().splitlines()) == 41
    assert (tmp_path / "env" / "traj.binned.csv").exists()
    assert (tmp_path / "env" / "traj.svg").exists()
    assert dispatch(["simulate", "--config", str(traj) + ".manifest", "--out", str(tmp_path / "again.csv")]) == 0
    assert (tmp_path / "again.csv").read_bytes() == first


def test_sweep_outputs_and_rerun_from_manifest(tmp_path, capsys):
    out = tmp_path / "f3"
    assert dispatch(["sweep", "--preset", "fig3", "--fast", "--seed", "5", "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert {"grid.csv", "config.echo", "manifest.txt", "pvalues.csv", "heatmap.svg"} <= names
    assert len((out / "grid.csv").read_text().splitlines()) == 1 + 8
    again = tmp_path / "again"
    assert dispatch(["sweep", "--config", str(out / "manifest.txt"), "--out", str(again)]) == 0
    for name in names - {"manifest.txt"}:
        assert (again / name).read_bytes() == (out / name).read_bytes(), name


def test_sweep_hetero_heatmaps(tmp_path, monkeypatch):
    import fitdrift.sweep as sweep

    monkeypatch.setattr(sweep, "FAST_REPLICATES", 10)
    out = tmp_path / "s4"
    assert dispatch(["sweep", "--preset", "s4", "--fast", "--out", str(out)]) == 0
    svgs = sorted(p.name for p in out.glob("*.svg"))
    assert "heatmap_N1000_bins15.svg" in svgs and len(svgs) == 6


def test_robustness(light, tmp_path, capsys):
    assert dispatch(["robustness", "--input", str(light), "--strategies", "c=1,20y,none"]) == 0
    captured = capsys.readouterr()
    assert len(captured.out.splitlines()) == 4
    assert "verdict:" in captured.err
    out = tmp_path / "rob"
    assert dispatch(["robustness", "--input", str(light), "--out", str(out)]) == 0
    assert len((out / "robustness.csv").read_text().splitlines()) == 14
    assert (out / "verdict.txt").read_text().strip() == "binning-sensitive"


def test_console_module_help():
    res = subprocess.run([sys.executable, "-m", "fitdrift.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "robustness" in res.stdout
