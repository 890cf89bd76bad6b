"""Minimal standalone SVG output: sweep heatmaps and line plots.

No imaging dependency is used; documents are built from strings and carry
no external references.  Heatmap cells are ``<rect class="cell">`` elements,
one per grid cell, so they can be counted or restyled downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from .errors import ValidationError
from .sweep import GridResult

MASKED_FILL = "#ffffff"
CELL = 14
MARGIN_LEFT = 60
MARGIN_TOP = 30
MARGIN_BOTTOM = 50
MARGIN_RIGHT = 20

STAT_ATTRS = {
    "pct_lt_alpha_all": "pct_p_below_alpha_all",
    "pct_lt_alpha_filtered": "pct_p_below_alpha_filtered",
    "mean_p_all": "mean_p_all",
    "mean_p_filtered": "mean_p_filtered",
    "pct_norm_pass": "pct_normality_pass",
    "pct_degenerate": "pct_degenerate",
}


@dataclass(frozen=True)
class ColorRamp:
    """Piecewise-linear colour ramp over ``[vmin, vmax]``; no stop is white."""

    stops: tuple[str, ...] = ("#440154", "#3b528b", "#21918c", "#5ec962", "#fde725")
    vmin: float = 0.0
    vmax: float = 1.0

    def __post_init__(self):
        if len(self.stops) < 2:
            raise ValidationError("a colour ramp needs at least two stops")
        if not self.vmax > self.vmin:
            raise ValidationError("vmax must exceed vmin")
        for s in self.stops:
            _rgb(s)
            if s.lower() == MASKED_FILL:
                raise ValidationError("white is reserved for masked cells")

    def __call__(self, value: float | None) -> str:
        if value is None or math.isnan(value):
            return MASKED_FILL
        x = (min(max(value, self.vmin), self.vmax) - self.vmin) / (self.vmax - self.vmin)
        pos = x * (len(self.stops) - 1)
        i = min(int(pos), len(self.stops) - 2)
        f = pos - i
        lo, hi = _rgb(self.stops[i]), _rgb(self.stops[i + 1])
        r, g, b = (round(a + (c - a) * f) for a, c in zip(lo, hi))
        out = f"#{r:02x}{g:02x}{b:02x}"
        # never collide with the masked colour
        return "#fefefe" if out == MASKED_FILL else out


def _rgb(hex_colour: str) -> tuple[int, int, int]:
    h = hex_colour.lstrip("#")
    if len(h) != 6:
        raise ValidationError(f"bad colour {hex_colour!r}")
    try:
        return int(h[0:2], 16), int(h[2:4], 16), int(h[4:6], 16)
    except ValueError:
        raise ValidationError(f"bad colour {hex_colour!r}") from None


def _label(x: float) -> str:
    return f"{x:g}"


def _ticks(values: Sequence[float], logscale: bool, max_ticks: int = 8) -> list[int]:
    """Column indices to label."""
    n = len(values)
    if n <= max_ticks:
        return list(range(n))
    if logscale:
        positive = [v for v in values if v > 0]
        out = [i for i, v in enumerate(values) if v == 0]
        if positive:
            lo = math.floor(math.log10(min(positive)))
            hi = math.ceil(math.log10(max(positive)))
            for e in range(lo, hi + 1):
                target = 10.0 ** e
                if not min(positive) / 1.5 <= target <= max(positive) * 1.5:
                    continue
                i = min((i for i, v in enumerate(values) if v > 0),
                        key=lambda i: abs(math.log10(values[i]) - e))
                if i not in out:
                    out.append(i)
        return sorted(out)
    step = math.ceil(n / max_ticks)
    return list(range(0, n, step))


def render_heatmap_svg(grid: GridResult, ramp: ColorRamp = ColorRamp(),
                       value: str = "pct_lt_alpha_all", x: str = "s", y: str | None = None,
                       fixed: Mapping[str, float] | None = None, overlay: bool = True,
                       title: str | None = None) -> str:
    """Heatmap of one statistic over two key columns of a sweep grid.

    ``fixed`` selects a slice when the grid has more than two key columns.
    Masked cells are drawn white.  When ``overlay`` is set and the grid
    carries an ``original_region`` annotation, an unfilled white rectangle
    marks it.
    """
    if value not in STAT_ATTRS:
        raise ValidationError(f"unknown statistic {value!r}")
    if not grid.cells:
        raise ValidationError("cannot render an empty grid")
    if y is None:
        others = [k for k in grid.key_columns if k != x and k not in (fixed or {})]
        if len(others) != 1:
            raise ValidationError("cannot infer the y axis; pass y= and fixed=")
        y = others[0]
    fixed = dict(fixed or {})
    cells = [c for c in grid.cells
             if all(math.isclose(dict(c.key)[k], v, rel_tol=1e-12) for k, v in fixed.items())]
    if not cells:
        raise ValidationError("no cells match the requested slice")
    xs = sorted({dict(c.key)[x] for c in cells})
    ys = sorted({dict(c.key)[y] for c in cells}, reverse=True)
    lookup = {(dict(c.key)[x], dict(c.key)[y]): c for c in cells}
    if len(lookup) != len(xs) * len(ys):
        raise ValidationError("grid is incomplete or has duplicate cells")

    cw = max(2.0, min(CELL, 600 / len(xs)))
    ch = max(2.0, min(CELL, 400 / len(ys)))
    width = MARGIN_LEFT + cw * len(xs) + MARGIN_RIGHT
    height = MARGIN_TOP + ch * len(ys) + MARGIN_BOTTOM
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}" font-family="sans-serif" font-size="10">',
        f"<title>{escape(title or f'{value} over {x} and {y}')}</title>",
    ]
    for j, yv in enumerate(ys):
        for i, xv in enumerate(xs):
            c = lookup[(xv, yv)]
            v = getattr(c, STAT_ATTRS[value])
            out.append(
                f'<rect class="cell" x="{MARGIN_LEFT + i * cw:.2f}" y="{MARGIN_TOP + j * ch:.2f}" '
                f'width="{cw:.2f}" height="{ch:.2f}" fill="{ramp(v)}">'
                f"<title>{x}={_label(xv)} {y}={_label(yv)} {value}={'NA' if v is None else f'{v:.4f}'}</title></rect>"
            )

    x0, y0 = MARGIN_LEFT, MARGIN_TOP + ch * len(ys)
    out.append(f'<line class="axis" x1="{x0}" y1="{y0:.2f}" x2="{x0 + cw * len(xs):.2f}" y2="{y0:.2f}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0:.2f}" stroke="black"/>')
    for i in _ticks(xs, logscale=(x == "s")):
        cx = x0 + (i + 0.5) * cw
        out.append(f'<text x="{cx:.2f}" y="{y0 + 14:.2f}" text-anchor="middle">{_label(xs[i])}</text>')
    for j in _ticks(ys, logscale=False, max_ticks=12):
        cy = MARGIN_TOP + (j + 0.5) * ch + 3
        out.append(f'<text x="{x0 - 4}" y="{cy:.2f}" text-anchor="end">{_label(ys[j])}</text>')
    scale = " (log scale)" if x == "s" else ""
    out.append(f'<text x="{x0 + cw * len(xs) / 2:.2f}" y="{height - 12:.2f}" text-anchor="middle">{escape(x)}{scale}</text>')
    out.append(f'<text x="12" y="{MARGIN_TOP + ch * len(ys) / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 12 {MARGIN_TOP + ch * len(ys) / 2:.2f})">{escape(y)}</text>')

    region = grid.annotations.get("original_region") if overlay else None
    if region and x == "s" and y == "n_bins":
        cols = [i for i, v in enumerate(xs) if region["s_min"] <= v <= region["s_max"]]
        rows = [j for j, v in enumerate(ys) if region["n_bins_min"] <= v <= region["n_bins_max"]]
        if cols and rows:
            out.append(
                f'<rect class="overlay" x="{x0 + cols[0] * cw:.2f}" y="{MARGIN_TOP + rows[0] * ch:.2f}" '
                f'width="{(cols[-1] - cols[0] + 1) * cw:.2f}" height="{(rows[-1] - rows[0] + 1) * ch:.2f}" '
                f'fill="none" stroke="white" stroke-width="2"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_series_svg(series: Mapping[str, tuple[Sequence[float], Sequence[float]]],
                      x_label: str = "t", y_label: str = "v", width: int = 480, height: int = 300,
                      y_range: tuple[float, float] | None = (0.0, 1.0)) -> str:
    """Line plot with one polyline per named series."""
    if not series:
        raise ValidationError("nothing to plot")
    xs = [x for xv, _ in series.values() for x in xv]
    ys = [y for _, yv in series.values() for y in yv]
    if not xs:
        raise ValidationError("nothing to plot")
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = y_range if y_range else (min(ys), max(ys))
    xmax = xmax if xmax > xmin else xmin + 1
    ymax = ymax if ymax > ymin else ymin + 1
    pw, ph = width - MARGIN_LEFT - MARGIN_RIGHT, height - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (x - xmin) / (xmax - xmin) * pw

    def py(y):
        return MARGIN_TOP + ph - (y - ymin) / (ymax - ymin) * ph

    colours = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">']
    out.append(f'<line class="axis" x1="{MARGIN_LEFT}" y1="{MARGIN_TOP + ph}" x2="{MARGIN_LEFT + pw}" y2="{MARGIN_TOP + ph}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{MARGIN_TOP + ph}" stroke="black"/>')
    for v in (xmin, xmax):
        out.append(f'<text x="{px(v):.2f}" y="{MARGIN_TOP + ph + 14}" text-anchor="middle">{_label(v)}</text>')
    for v in (ymin, ymax):
        out.append(f'<text x="{MARGIN_LEFT - 4}" y="{py(v) + 3:.2f}" text-anchor="end">{_label(v)}</text>')
    out.append(f'<text x="{MARGIN_LEFT + pw / 2}" y="{height - 12}" text-anchor="middle">{escape(x_label)}</text>')
    out.append(f'<text x="12" y="{MARGIN_TOP + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 12 {MARGIN_TOP + ph / 2})">{escape(y_label)}</text>')
    for k, (name, (xv, yv)) in enumerate(series.items()):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xv, yv))
        colour = colours[k % len(colours)]
        out.append(f'<polyline class="series" fill="none" stroke="{colour}" points="{pts}">'
                   f"<title>{escape(name)}</title></polyline>")
        out.append(f'<text x="{MARGIN_LEFT + pw - 4}" y="{MARGIN_TOP + 12 * (k + 1)}" text-anchor="end" '
                   f'fill="{colour}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
