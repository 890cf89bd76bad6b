"""Command-line entry point: ``fitdrift fit|bin|simulate|sweep|robustness``.

Every option can also come from a flat ``key = value`` config file given with
``--config``; flags on the command line win.  ``FITDRIFT_OUTDIR`` sets the
default output directory.  Exit status is 0 on success, 1 for usage and
validation errors and 2 for I/O errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .binning import FixedWidth, NoBinning, VariableWidth, bin_counts, emit_binned_csv, to_frequency_series
from .errors import FitDriftError, ValidationError
from .fit import frequency_increment_test
from .report import DEFAULT_STRATEGIES, RunManifest, parse_strategy, robustness_report
from .series import COUNT_HEADER, FREQUENCY_HEADER, emit_frequency_csv, parse_counts_csv, parse_frequency_csv
from .svg import render_heatmap_svg, render_series_svg
from .sweep import PRESETS, preset, run_kind
from .wright_fisher import WFConfig, bin_trajectory, simulate

OUTDIR_ENV = "FITDRIFT_OUTDIR"
FIT_HEADER = "p_fit,t_stat,df,w,p_shapiro,normality_ok,warnings"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _str2bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ValidationError(f"not a boolean: {text!r}")


# name -> (type, default, help); every default is applied after the config file
OPTIONS = {
    "fit": {
        "input": (str, None, "frequency CSV (t,v,tokens) or count CSV (year,count_a,count_b)"),
        "strategy": (str, "variable", "binning for count input: variable|fixed|none"),
        "c": (float, 1.0, "variable-width bin constant"),
        "width": (int, 10, "fixed bin width in years"),
        "min_tokens": (int, 10, "minimum tokens per fixed or yearly bin"),
        "shapiro_threshold": (float, 0.1, "normality gate on the Shapiro-Wilk p-value"),
        "out": (str, None, "optional output directory"),
    },
    "bin": {
        "input": (str, None, "count CSV (year,count_a,count_b)"),
        "strategy": (str, "variable", "variable|fixed|none"),
        "c": (float, 1.0, "variable-width bin constant"),
        "width": (int, 10, "fixed bin width in years"),
        "min_tokens": (int, 10, "minimum tokens per fixed or yearly bin"),
        "out": (str, None, "output CSV path (default: stdout)"),
    },
    "simulate": {
        "N": (int, 1000, "population size"),
        "s": (float, 0.0, "selection coefficient"),
        "generations": (int, 200, "number of generations"),
        "start": (float, 0.5, "starting mutant fraction"),
        "seed": (int, 0, "random seed"),
        "bins": (int, None, "also write the trajectory binned into this many bins"),
        "out": (str, None, "trajectory CSV path (default: $FITDRIFT_OUTDIR/traj.csv)"),
    },
    "sweep": {
        "preset": (str, None, "|".join(PRESETS)),
        "fast": (_str2bool, False, "200 replicates instead of 1000"),
        "seed": (int, 0, "master seed (unsigned 64-bit)"),
        "workers": (int, 1, "worker processes"),
        "svg": (_str2bool, True, "write heatmap SVGs"),
        "out": (str, None, "output directory (default: $FITDRIFT_OUTDIR/<preset>)"),
    },
    "robustness": {
        "input": (str, None, "count CSV (year,count_a,count_b)"),
        "strategies": (str, None, "comma list such as c=0.5,c=1,10y,none (default: built-in list)"),
        "min_tokens": (int, 10, "minimum tokens per fixed or yearly bin"),
        "out": (str, None, "optional output directory"),
    },
}
FLAGS = {("sweep", "fast"), ("sweep", "svg")}
REQUIRED = {("fit", "input"), ("bin", "input"), ("sweep", "preset"), ("robustness", "input")}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fitdrift", description="Frequency Increment Test and Wright-Fisher sweeps.")
    parser.add_argument("--version", action="version", version=f"fitdrift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, opts in OPTIONS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value file; flags override it")
        for key, (typ, default, help_) in opts.items():
            flag = "--" + key.replace("_", "-")
            shown = f"{help_} (default: {default})" if default is not None else help_
            if (name, key) in FLAGS:
                p.add_argument(flag, dest=key, action="store_const", const=True, default=None, help=shown)
                p.add_argument("--no-" + key, dest=key, action="store_const", const=False)
            else:
                p.add_argument(flag, dest=key, type=str, default=None, help=shown)
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(command: str, ns: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags, converting every value once."""
    config = read_config(ns.config) if ns.config else {}
    params = {}
    for key, (typ, default, _) in OPTIONS[command].items():
        raw = getattr(ns, key)
        if raw is None and key in config and config[key] != "":
            raw = config[key]
        if raw is None:
            if (command, key) in REQUIRED:
                raise UsageError(f"fitdrift {command}: --{key.replace('_', '-')} is required")
            params[key] = default
            continue
        try:
            params[key] = raw if isinstance(raw, bool) else typ(raw)
        except ValueError:
            raise ValidationError(f"bad value for {key}: {raw!r}") from None
    return params


def _outdir(explicit: str | None, fallback: str) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(OUTDIR_ENV, ".")) / fallback


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _spec(params):
    strategy = params["strategy"]
    if strategy == "variable":
        return VariableWidth(params["c"])
    if strategy == "fixed":
        return FixedWidth(params["width"], params["min_tokens"])
    if strategy == "none":
        return NoBinning(params["min_tokens"])
    raise ValidationError(f"unknown strategy {strategy!r}")


def _load_frequency(params):
    text = Path(params["input"]).read_text(encoding="utf-8")
    header = text.lstrip().split("\n", 1)[0].strip().lower()
    header = tuple(h.strip() for h in header.split(","))
    if header == FREQUENCY_HEADER:
        return parse_frequency_csv(text)
    if header == COUNT_HEADER:
        return to_frequency_series(bin_counts(parse_counts_csv(text), _spec(params)))
    raise ValidationError(f"unrecognised header {','.join(header)!r}")


def _g(x) -> str:
    return "NA" if x is None else repr(x)


def cmd_fit(params) -> int:
    fs = _load_frequency(params)
    res = frequency_increment_test(fs, params["shapiro_threshold"])
    record = ",".join([_g(res.p_fit), _g(res.t_stat), str(res.df), _g(res.w_stat), _g(res.p_shapiro),
                       str(res.normality_ok).lower(), ";".join(res.warnings)])
    print(FIT_HEADER)
    print(record)
    if params["out"]:
        out = Path(params["out"])
        _write(out / "fit.csv", f"{FIT_HEADER}\n{record}\n")
        _write(out / "series.csv", emit_frequency_csv(fs))
        _write(out / "increments.csv", "index,y\n" + "".join(f"{i},{y!r}\n" for i, y in enumerate(res.increments, 1)))
        _write(out / "series.svg", render_series_svg({"v": (fs.t, fs.v)}))
        files = ["fit.csv", "series.csv", "increments.csv", "series.svg"]
        _write(out / "manifest.txt", RunManifest("fit", params, [params["input"]], files).to_text())
    return 0


def cmd_bin(params) -> int:
    cs = parse_counts_csv(Path(params["input"]).read_text(encoding="utf-8"))
    text = emit_binned_csv(bin_counts(cs, _spec(params)))
    if params["out"]:
        out = Path(params["out"])
        _write(out, text)
        _write(out.with_name(out.name + ".manifest"),
               RunManifest("bin", params, [params["input"]], [out.name]).to_text())
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(params) -> int:
    cfg = WFConfig(params["N"], params["s"], params["generations"], params["start"])
    traj = simulate(cfg, np.random.default_rng(params["seed"]))
    out = Path(params["out"]) if params["out"] else _outdir(None, "traj.csv")
    _write(out, "generation,count\n" + "".join(f"{g},{c}\n" for g, c in enumerate(traj.counts)))
    files = [out.name]
    series = {"frequency": (list(range(traj.generations)), list(traj.frequencies()))}
    if params["bins"] is not None:
        fs = bin_trajectory(traj, params["bins"])
        binned = out.with_name(out.stem + ".binned.csv")
        _write(binned, emit_frequency_csv(fs))
        files.append(binned.name)
        series["binned"] = (fs.t, fs.v)
    plot = out.with_name(out.stem + ".svg")
    _write(plot, render_series_svg(series, x_label="generation", y_label="mutant frequency"))
    files.append(plot.name)
    _write(out.with_name(out.name + ".manifest"),
           RunManifest("simulate", params, [], files, seed=params["seed"]).to_text())
    print(out)
    return 0


def cmd_sweep(params) -> int:
    if params["preset"] not in PRESETS:
        raise ValidationError(f"unknown preset {params['preset']!r}; choose from {', '.join(PRESETS)}")
    if params["workers"] < 1:
        raise ValidationError("workers must be >= 1")
    kind, cfg, kw = preset(params["preset"], params["fast"], params["seed"])
    grid = run_kind(kind, cfg, workers=params["workers"], **kw)
    out = _outdir(params["out"], params["preset"])
    _write(out / "grid.csv", grid.to_csv())
    _write(out / "config.echo", grid.config_echo())
    files = ["grid.csv", "config.echo"]
    if cfg.showcase_bins:
        _write(out / "pvalues.csv", grid.pvalues_csv())
        files.append("pvalues.csv")
    if params["svg"]:
        files += _write_heatmaps(grid, out)
    _write(out / "manifest.txt", RunManifest("sweep", params, [], files, seed=params["seed"]).to_text())
    print(out)
    return 0


def _write_heatmaps(grid, out: Path) -> list[str]:
    files = []
    if grid.kind == "hetero":
        cols = dict(zip(grid.key_columns, zip(*[[v for _, v in c.key] for c in grid.cells])))
        for N in sorted(set(cols["N"])):
            for b in sorted(set(cols["n_bins"]), reverse=True):
                name = f"heatmap_N{N:g}_bins{b:g}.svg"
                _write(out / name, render_heatmap_svg(grid, x="sigma", y="M", fixed={"N": N, "n_bins": b}))
                files.append(name)
        return files
    for value, name in (("pct_lt_alpha_all", "heatmap.svg"), ("pct_lt_alpha_filtered", "heatmap_filtered.svg")):
        _write(out / name, render_heatmap_svg(grid, value=value))
        files.append(name)
    return files


def cmd_robustness(params) -> int:
    cs = parse_counts_csv(Path(params["input"]).read_text(encoding="utf-8"))
    if params["strategies"]:
        strategies = [parse_strategy(s, params["min_tokens"]) for s in params["strategies"].split(",") if s.strip()]
    else:
        strategies = [_with_min_tokens(s, params["min_tokens"]) for s in DEFAULT_STRATEGIES]
    rep = robustness_report(cs, strategies)
    if params["out"]:
        out = Path(params["out"])
        _write(out / "robustness.csv", rep.to_csv())
        _write(out / "verdict.txt", rep.verdict + "\n")
        _write(out / "manifest.txt",
               RunManifest("robustness", params, [params["input"]], ["robustness.csv", "verdict.txt"]).to_text())
    else:
        sys.stdout.write(rep.to_csv())
    print(f"verdict: {rep.verdict}", file=sys.stderr if not params["out"] else sys.stdout)
    return 0


def _with_min_tokens(spec, min_tokens):
    if isinstance(spec, FixedWidth):
        return FixedWidth(spec.width_years, min_tokens)
    if isinstance(spec, NoBinning):
        return NoBinning(min_tokens)
    return spec


COMMANDS = {"fit": cmd_fit, "bin": cmd_bin, "simulate": cmd_simulate, "sweep": cmd_sweep,
            "robustness": cmd_robustness}


def dispatch(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        params = resolve(ns.command, ns)
        return COMMANDS[ns.command](params)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (FitDriftError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
