"""Minimal SVG line charts of trajectory files, one panel per learning rate."""

import math
import re
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .records import read_trajectory_csv

_ETA_RE = re.compile(r"eta([0-9.eE+-]+?)_seed")

PANEL_W, PANEL_H = 320, 220
MARGIN_L, MARGIN_B, MARGIN_T, MARGIN_R = 52, 38, 26, 12
COLUMNS = 3


def eta_of(path) -> str:
    m = _ETA_RE.search(Path(path).name)
    return m.group(1) if m else ""


def _fmt(v):
    return f"{v:.4g}"


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, count))


def render_svg(files, field="pi1", logx=False, max_points=2000) -> str:
    """SVG source overlaying `field` of every file, grouped into panels by eta."""
    groups = {}
    for f in sorted(files, key=str):
        groups.setdefault(eta_of(f), []).append(f)
    keys = sorted(groups, key=lambda e: -float(e) if e else 0.0)
    series = {}
    for key in keys:
        lines = []
        for f in groups[key]:
            data = read_trajectory_csv(f)
            if field not in data:
                raise KeyError(field)
            t, y = data["t"], data[field]
            if len(t) > max_points:
                idx = np.unique(np.linspace(0, len(t) - 1, max_points).astype(int))
                t, y = t[idx], y[idx]
            lines.append((t, y))
        series[key] = lines

    ncol = min(COLUMNS, len(keys))
    nrow = math.ceil(len(keys) / ncol)
    width, height = ncol * PANEL_W, nrow * PANEL_H
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">',
        f"<!-- pgbandit {__version__} -->",
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for p, key in enumerate(keys):
        ox, oy = (p % ncol) * PANEL_W, (p // ncol) * PANEL_H
        out.extend(_panel(series[key], key, field, logx, ox, oy))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _panel(lines, key, field, logx, ox, oy):
    x0, y0 = ox + MARGIN_L, oy + MARGIN_T
    w, h = PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B
    tx = lambda t: np.log10(np.maximum(t, 1.0)) if logx else t  # noqa: E731
    xs = np.concatenate([tx(t) for t, _ in lines])
    ys = np.concatenate([y for _, y in lines])
    ys = ys[np.isfinite(ys)]
    xlo, xhi = float(xs.min()), float(xs.max())
    ylo, yhi = (0.0, 1.0) if field == "pi1" else (float(ys.min()), float(ys.max()))
    if xhi == xlo:
        xhi = xlo + 1
    if yhi == ylo:
        yhi = ylo + 1
    sx = lambda v: x0 + (v - xlo) / (xhi - xlo) * w  # noqa: E731
    sy = lambda v: y0 + h - (v - ylo) / (yhi - ylo) * h  # noqa: E731
    title = f"eta = {key}" if key else "trajectories"
    parts = [
        f'<text x="{x0 + w / 2:.1f}" y="{oy + 16}" text-anchor="middle">{escape(title)}</text>',
        f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#444"/>',
    ]
    for v in _ticks(xlo, xhi):
        label = _fmt(10**v) if logx else _fmt(v)
        parts.append(f'<text x="{sx(v):.1f}" y="{y0 + h + 13}" text-anchor="middle">{label}</text>')
    for v in _ticks(ylo, yhi):
        parts.append(f'<text x="{x0 - 4}" y="{sy(v) + 3:.1f}" text-anchor="end">{_fmt(v)}</text>')
    parts.append(f'<text x="{x0 + w / 2:.1f}" y="{y0 + h + 28}" text-anchor="middle">'
                 f'{"t (log scale)" if logx else "t"}</text>')
    parts.append(f'<text x="{ox + 12}" y="{y0 + h / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 {ox + 12} {y0 + h / 2:.1f})">{escape(field)}</text>')
    opacity = max(0.08, min(0.8, 4.0 / len(lines)))
    for t, y in lines:
        keep = np.isfinite(y)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(tx(t[keep]), y[keep]))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="0.8" '
                     f'stroke-opacity="{opacity:.3f}"/>')
    return parts


def plot_files(files, out_path, field="pi1", logx=False) -> None:
    svg = render_svg(files, field, logx)
    Path(out_path).write_text(svg)
