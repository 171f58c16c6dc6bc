"""Bare-bones SVG line plots and heatmaps (no plotting dependency)."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 55
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
          "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _frame(title: str, xlabel: str, ylabel: str, xr, yr, sx, sy) -> list[str]:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{W - LEFT - RIGHT}" height="{H - TOP - BOTTOM}" fill="none" stroke="black"/>',
        f'<text x="{LEFT + (W - LEFT - RIGHT) / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{TOP + (H - TOP - BOTTOM) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + (H - TOP - BOTTOM) / 2})">{escape(ylabel)}</text>',
    ]
    for x in _ticks(*xr):
        parts.append(f'<text x="{sx(x):.1f}" y="{H - BOTTOM + 16}" text-anchor="middle">{x:.3g}</text>')
    for y in _ticks(*yr):
        parts.append(f'<text x="{LEFT - 6}" y="{sy(y) + 4:.1f}" text-anchor="end">{y:.3g}</text>')
    return parts


def _range(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def line_plot(path, x: Sequence[float], series: Mapping[str, Sequence[float]],
              title: str = "", xlabel: str = "", ylabel: str = "") -> Path:
    x = np.asarray(x, dtype=float)
    xr = _range(x)
    yr = _range(np.concatenate([np.asarray(s, dtype=float) for s in series.values()]))
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(v):
        return LEFT + (v - xr[0]) / (xr[1] - xr[0]) * pw

    def sy(v):
        return TOP + ph - (v - yr[0]) / (yr[1] - yr[0]) * ph

    parts = _frame(title, xlabel, ylabel, xr, yr, sx, sy)
    for k, (name, ys) in enumerate(series.items()):
        color = COLORS[k % len(COLORS)]
        segments, cur = [], []
        for xi, yi in zip(x, np.asarray(ys, dtype=float)):
            if math.isfinite(yi):
                cur.append(f"{sx(xi):.2f},{sy(yi):.2f}")
            elif cur:
                segments.append(cur)
                cur = []
        if cur:
            segments.append(cur)
        for seg in segments:
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(seg)}"/>')
        ly = TOP + 14 + 16 * k
        parts.append(f'<line x1="{W - RIGHT + 10}" y1="{ly}" x2="{W - RIGHT + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{W - RIGHT + 34}" y="{ly + 4}">{escape(name)}</text>')
    parts.append("</svg>")
    return _write(path, parts)


def _viridis_like(f: float) -> str:
    f = min(1.0, max(0.0, f))
    r = int(68 + f * (253 - 68))
    g = int(1 + f * (231 - 1))
    b = int(84 + (1 - f) * 70 * (1 - f) - f * 47)
    return f"rgb({r},{g},{max(0, min(255, b))})"


def heatmap(path, xgrid: Sequence[float], ygrid: Sequence[float], Z, title: str = "",
            xlabel: str = "", ylabel: str = "", label: str = "") -> Path:
    """``Z`` is indexed ``[ix, iy]``; NaN cells are left blank."""
    Z = np.asarray(Z, dtype=float)
    xg, yg = np.asarray(xgrid, dtype=float), np.asarray(ygrid, dtype=float)
    xr, yr = _range(xg), _range(yg)
    zr = _range(Z)
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM
    cw, ch = pw / len(xg), ph / len(yg)

    def sx(v):
        return LEFT + (v - xr[0]) / (xr[1] - xr[0]) * (pw - cw) + cw / 2

    def sy(v):
        return TOP + ph - (v - yr[0]) / (yr[1] - yr[0]) * (ph - ch) - ch / 2

    parts = _frame(title, xlabel, ylabel, xr, yr, sx, sy)
    for i in range(len(xg)):
        for j in range(len(yg)):
            z = Z[i, j]
            if not math.isfinite(z):
                continue
            f = (z - zr[0]) / (zr[1] - zr[0])
            parts.append(
                f'<rect x="{LEFT + i * cw:.2f}" y="{TOP + ph - (j + 1) * ch:.2f}" '
                f'width="{cw + 0.3:.2f}" height="{ch + 0.3:.2f}" fill="{_viridis_like(f)}"/>'
            )
    for k in range(6):
        f = k / 5
        y = TOP + ph - f * ph
        parts.append(f'<rect x="{W - RIGHT + 15}" y="{y - ph / 5:.1f}" width="18" height="{ph / 5:.1f}" fill="{_viridis_like(f)}"/>'
                     if k < 5 else "")
        parts.append(f'<text x="{W - RIGHT + 38}" y="{y + 4:.1f}">{zr[0] + f * (zr[1] - zr[0]):.3g}</text>')
    parts.append(f'<text x="{W - RIGHT + 15}" y="{TOP - 8}">{escape(label)}</text>')
    parts.append("</svg>")
    return _write(path, parts)


def _write(path, parts) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(p for p in parts if p), encoding="utf-8")
    return path
