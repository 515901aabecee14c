"""Minimal self-contained SVG line/scatter plots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=170, top=40, bottom=60)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class Series:
    name: str
    xs: list
    ys: list
    style: str = "line"  # "line" or "markers"


def _range(vals: list[float]) -> tuple[float, float]:
    lo, hi = min(vals), max(vals)
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        pad = 0.5 if hi == 0 else 0.1 * abs(hi)
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=mag * 10)
    start = math.ceil(lo / step) * step
    out, t = [], start
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


def _num(x: float) -> str:
    return format(x, ".6g")


def render_svg(series: list[Series], title: str = "", xlabel: str = "x",
               ylabel: str = "y", metadata: str = "") -> str:
    """Render series on shared axes; ranges are padded when degenerate."""
    pts = [(x, y) for s in series for x, y in zip(s.xs, s.ys)]
    if not pts:
        raise ValueError("nothing to plot: all series are empty")
    x0, x1 = _range([p[0] for p in pts])
    y0, y1 = _range([p[1] for p in pts])
    L, R, T, B = MARGIN["left"], MARGIN["right"], MARGIN["top"], MARGIN["bottom"]
    pw, ph = WIDTH - L - R, HEIGHT - T - B

    def sx(x):
        return L + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return T + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
    ]
    if metadata:
        out.append(f"<metadata>{escape(metadata)}</metadata>")
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        out.append(f'<text x="{L + pw / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<rect x="{L}" y="{T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(x0, x1):
        X = _num(sx(t))
        out.append(f'<line x1="{X}" y1="{T + ph}" x2="{X}" y2="{T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{T + ph + 18}" text-anchor="middle">{_num(t)}</text>')
    for t in _ticks(y0, y1):
        Y = _num(sy(t))
        out.append(f'<line x1="{L - 5}" y1="{Y}" x2="{L}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{L - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">{_num(t)}</text>')
    out.append(f'<text x="{L + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{T + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {T + ph / 2})">{escape(ylabel)}</text>')

    legend = [s for s in series if s.xs]
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        if not s.xs:
            continue
        if s.style == "line":
            path = " ".join(f"{_num(sx(x))},{_num(sy(y))}" for x, y in zip(s.xs, s.ys))
            out.append(f'<polyline class="series" points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        else:
            for x, y in zip(s.xs, s.ys):
                out.append(f'<circle class="series" cx="{_num(sx(x))}" cy="{_num(sy(y))}" r="3.5" fill="{color}"/>')
    for j, s in enumerate(legend):
        color = PALETTE[series.index(s) % len(PALETTE)]
        ly = T + 10 + 20 * j
        lx = L + pw + 15
        if s.style == "line":
            out.append(f'<line class="legend" x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        else:
            out.append(f'<circle class="legend" cx="{lx + 10}" cy="{ly}" r="3.5" fill="{color}"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}" dominant-baseline="middle">{escape(s.name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def e_curve_series(k: int, ps: list[float], slopes: list[float] | None = None) -> list[Series]:
    """Theoretical E(p) as a line (with the knee included) plus fitted slopes as markers."""
    from .scaling import critical_point, theoretical_e

    grid = sorted(set(ps) | ({critical_point(k)} if ps and min(ps) <= critical_point(k) <= max(ps) else set()))
    out = [Series("E(p) theory", grid, [theoretical_e(k, p) for p in grid], "line")]
    out.append(Series("fitted slope", list(ps) if slopes else [], list(slopes or []), "markers"))
    return out
