"""Minimal SVG line/scatter plots of summary CSV columns."""

from __future__ import annotations

import csv
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT, MARGIN = 480, 320, 48


class PlotError(ValueError):
    pass


def _read_columns(csv_path, x: str, y: str) -> list[tuple[float, float]]:
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PlotError(f"{csv_path} is empty")
        for col in (x, y):
            if col not in reader.fieldnames:
                raise PlotError(f"column {col!r} not in {reader.fieldnames}")
        pts = []
        for row in reader:
            if row[x] == "" or row[y] == "":
                continue
            try:
                pts.append((float(row[x]), float(row[y])))
            except ValueError as exc:
                raise PlotError(f"non-numeric value in {x} or {y}: {exc}") from exc
    if not pts:
        raise PlotError(f"{csv_path} has no data rows for {x}, {y}")
    return sorted(pts)


def _scale(lo: float, hi: float, a: float, b: float):
    if hi == lo:
        return lambda v: (a + b) / 2
    return lambda v: a + (v - lo) * (b - a) / (hi - lo)


def render_svg(points: list[tuple[float, float]], x: str, y: str) -> str:
    xs, ys = [p[0] for p in points], [p[1] for p in points]
    sx = _scale(min(xs), max(xs), MARGIN, WIDTH - MARGIN)
    sy = _scale(min(ys), max(ys), HEIGHT - MARGIN, MARGIN)
    coords = [(sx(a), sy(b)) for a, b in points]
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle" font-size="12">{escape(x)}</text>',
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">{escape(y)}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="10">{min(xs):.4g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" text-anchor="end" font-size="10">{max(xs):.4g}</text>',
        f'<text x="{MARGIN - 4}" y="{HEIGHT - MARGIN}" text-anchor="end" font-size="10">{min(ys):.4g}</text>',
        f'<text x="{MARGIN - 4}" y="{MARGIN + 4}" text-anchor="end" font-size="10">{max(ys):.4g}</text>',
    ]
    if len(coords) > 1:
        path = " ".join(f"{a:.2f},{b:.2f}" for a, b in coords)
        lines.append(f'<polyline points="{path}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    lines += [f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="steelblue"/>' for a, b in coords]
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_plot(csv_path, x: str, y: str, out) -> Path:
    """Plot column ``y`` against ``x``; nothing is written if the data is unusable."""
    svg = render_svg(_read_columns(csv_path, x, y), x, y)
    out = Path(out)
    out.write_text(svg)
    return out
