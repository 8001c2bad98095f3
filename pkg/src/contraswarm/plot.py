"""Self-contained SVG line charts of metric series read back from run output."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .runner import read_series

WIDTH, HEIGHT = 720, 420
MARGIN = {"left": 70, "right": 190, "top": 30, "bottom": 50}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")


class PlotError(ValueError):
    pass


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    out, v = [], first
    while v <= hi + step * 1e-9:
        out.append(round(v, 12))
        v += step
    return out


def _label(v: float) -> str:
    return "%g" % v


def render_svg(series: dict, metric: str) -> str:
    """Chart ``{series id: [(step, value), ...]}`` as SVG text. NaN points break a line."""
    if not series or not any(series.values()):
        raise PlotError(f"no data for {metric}")
    points = [(s, v) for pts in series.values() for s, v in pts if not math.isnan(v)]
    if not points:
        raise PlotError(f"every value of {metric} is NaN")
    x_lo, x_hi = min(s for s, _ in points), max(s for s, _ in points)
    y_lo, y_hi = min(v for _, v in points), max(v for _, v in points)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = (y_hi - y_lo) * 0.05
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left, top = MARGIN["left"], MARGIN["top"]
    plot_w = WIDTH - MARGIN["left"] - MARGIN["right"]
    plot_h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(s):
        return left + (s - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        return top + (y_hi - v) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{top + plot_h}" x2="{x:.2f}" '
                   f'y2="{top + plot_h + 5}" stroke="#333"/>')
        out.append(f'<text x="{x:.2f}" y="{top + plot_h + 18}" '
                   f'text-anchor="middle">{_label(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        y = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="#333"/>')
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + plot_w}" y2="{y:.2f}" '
                   'stroke="#ddd"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{_label(t)}</text>')
    out.append(f'<text x="{left + plot_w / 2:.0f}" y="{HEIGHT - 10}" '
               'text-anchor="middle">step</text>')
    out.append(f'<text transform="translate(16,{top + plot_h / 2:.0f}) rotate(-90)" '
               f'text-anchor="middle">{escape(metric)}</text>')

    for i, (name, pts) in enumerate(series.items()):
        colour = PALETTE[i % len(PALETTE)]
        runs, current = [], []
        for s, v in sorted(pts):
            if math.isnan(v):
                if current:
                    runs.append(current)
                current = []
            else:
                current.append(f"{sx(s):.2f},{sy(v):.2f}")
        if current:
            runs.append(current)
        for run in runs:
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" '
                       f'points="{" ".join(run)}"/>')
        ly = top + 10 + 18 * i
        lx = left + plot_w + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot(csv_path, metric: str, out_path) -> Path:
    """Draw every series of ``metric`` found in a metrics or medians CSV."""
    data = read_series(csv_path)
    if metric not in data:
        available = ", ".join(sorted(data)) or "none"
        raise PlotError(f"metric {metric!r} not in {csv_path}; available: {available}")
    out_path = Path(out_path)
    out_path.write_text(render_svg(data[metric], metric), encoding="utf-8")
    return out_path
