"""Minimal standalone SVG line plots.

Output depends only on the input numbers (fixed formatting, no timestamps),
so identical series give byte-identical files.
"""
from __future__ import annotations

import math
from typing import Sequence

from .errors import IoFailure

WIDTH, HEIGHT, MARGIN = 480, 320, 48
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _range(values):
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if hi == lo:
        pad = 0.5 * abs(lo) if lo else 0.5
        return lo - pad, hi + pad
    return lo, hi


def render_svg(series: Sequence[tuple[str, Sequence[float], Sequence[float]]], title: str = "",
               xlabel: str = "", ylabel: str = "") -> str:
    for name, xs, ys in series:
        if len(xs) != len(ys):
            raise ValueError(f"series {name!r}: x and y lengths differ")
    x0, x1 = _range([float(v) for _, xs, _ in series for v in xs])
    y0, y1 = _range([float(v) for _, _, ys in series for v in ys])
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def px(x):
        return MARGIN + (x - x0) / (x1 - x0) * pw

    def py(y):
        return HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g id="axes" stroke="black" stroke-width="1">'
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}"/>'
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}"/></g>',
        f'<g font-family="sans-serif" font-size="10">'
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 14}">{x0:.4g}</text>'
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 14}" text-anchor="end">{x1:.4g}</text>'
        f'<text x="{MARGIN - 4}" y="{HEIGHT - MARGIN}" text-anchor="end">{y0:.4g}</text>'
        f'<text x="{MARGIN - 4}" y="{MARGIN + 4}" text-anchor="end">{y1:.4g}</text>'
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">{_esc(xlabel)}</text>'
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">{_esc(ylabel)}</text>'
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="12">{_esc(title)}</text></g>',
    ]
    for k, (name, xs, ys) in enumerate(series):
        pts = " ".join(f"{px(float(x)):.3f},{py(float(y)):.3f}" for x, y in zip(xs, ys)
                       if math.isfinite(float(x)) and math.isfinite(float(y)))
        out.append(f'<polyline data-name="{_esc(name)}" fill="none" stroke="{COLORS[k % len(COLORS)]}" '
                   f'stroke-width="1.5" points="{pts}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def emit_plot(series, path, **labels) -> None:
    """Write ``series`` (list of ``(name, xs, ys)``) as an SVG file."""
    text = render_svg(series, **labels)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write plot {path}: {exc}") from exc
