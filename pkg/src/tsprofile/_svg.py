"""Minimal static SVG renderer for series + profile charts.

Writes two stacked line panels (series on top, profile below) without any
plotting or display dependency.  Sentinel profile entries break the line.
"""

from __future__ import annotations

import math

_WIDTH = 960
_PANEL_HEIGHT = 220
_MARGIN = 45
_GAP = 30


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span <= 0:
        span = 1.0
        lo -= 0.5
    return [(out_lo + (v - lo) / span * (out_hi - out_lo)) for v in values]


def _panel_polylines(values, x0, y0, width, height):
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return [], (0.0, 0.0)
    lo, hi = min(finite), max(finite)
    n = len(values)
    xs = _scale(range(n), 0, max(n - 1, 1), x0, x0 + width)
    segments = []
    current = []
    for idx, v in enumerate(values):
        if math.isfinite(v):
            y = y0 + height - (_scale([v], lo, hi, 0, height))[0]
            current.append(f"{xs[idx]:.2f},{y:.2f}")
        elif current:
            segments.append(current)
            current = []
    if current:
        segments.append(current)
    polys = [
        f'<polyline fill="none" stroke="#1f6fb2" stroke-width="1" points="{" ".join(seg)}"/>'
        for seg in segments
        if len(seg) >= 2
    ]
    return polys, (lo, hi)


def render_profile_svg(series, profile_values, path, title="matrix profile"):
    """Write an SVG with the series (top) and its profile (bottom)."""
    height = 2 * _PANEL_HEIGHT + _GAP + 2 * _MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{height}" '
        f'viewBox="0 0 {_WIDTH} {height}">',
        f'<rect width="{_WIDTH}" height="{height}" fill="white"/>',
    ]
    panels = [
        ("series", [float(v) for v in series]),
        (title, [float(v) for v in profile_values]),
    ]
    plot_w = _WIDTH - 2 * _MARGIN
    for pos, (label, values) in enumerate(panels):
        y0 = _MARGIN + pos * (_PANEL_HEIGHT + _GAP)
        parts.append(
            f'<rect x="{_MARGIN}" y="{y0}" width="{plot_w}" height="{_PANEL_HEIGHT}" '
            f'fill="none" stroke="#999" stroke-width="1"/>'
        )
        polys, (lo, hi) = _panel_polylines(values, _MARGIN, y0, plot_w, _PANEL_HEIGHT)
        parts.extend(polys)
        parts.append(
            f'<text x="{_MARGIN}" y="{y0 - 6}" font-family="sans-serif" '
            f'font-size="13">{label} (min {lo:.4g}, max {hi:.4g})</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
