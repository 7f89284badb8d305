"""Standalone SVG scatter of an envelope dataset in the (nu, NCTE) plane."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 480
MARGIN = {"left": 70, "right": 20, "top": 30, "bottom": 55}


def pareto_frontier(points) -> list:
    """Points not dominated when minimising both nu and NCTE, sorted by nu."""
    pts = sorted(points, key=lambda p: (p.nu, p.ncte))
    front, best = [], math.inf
    for p in pts:
        if p.ncte < best:
            front.append(p)
            best = p.ncte
    return front


def _nice_ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    span = hi - lo
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * span:
        ticks.append(round(v, 12))
        v += step
    return ticks


def render_svg(points, path=None, title: str = "Design envelope") -> str:
    feasible = [p for p in points if p.feasible and math.isfinite(p.nu) and math.isfinite(p.ncte)]
    hidden = len(points) - len(feasible)

    xs = [p.nu for p in feasible] + [0.0]
    ys = [p.ncte for p in feasible] + [0.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    pad_x = 0.08 * (x1 - x0) or 0.1
    pad_y = 0.08 * (y1 - y0) or 0.1
    x0, x1, y0, y1 = x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y

    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{escape(title)}</title>",
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _nice_ticks(x0, x1):
        X = sx(v)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 18}" font-size="11" text-anchor="middle">{v:g}</text>')
    for v in _nice_ticks(y0, y1):
        Y = sy(v)
        out.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{Y + 4:.2f}" font-size="11" text-anchor="end">{v:g}</text>')
    out.append(
        f'<line class="reference" x1="{sx(0):.2f}" y1="{top}" x2="{sx(0):.2f}" y2="{top + ph}" stroke="grey" stroke-dasharray="4 3"/>'
    )
    out.append(
        f'<line class="reference" x1="{left}" y1="{sy(0):.2f}" x2="{left + pw}" y2="{sy(0):.2f}" stroke="grey" stroke-dasharray="4 3"/>'
    )
    out.append(
        f'<text x="{left + pw / 2}" y="{HEIGHT - 12}" font-size="13" text-anchor="middle">Poisson\'s ratio, &#957;</text>'
    )
    out.append(
        f'<text x="16" y="{top + ph / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {top + ph / 2})">NCTE</text>'
    )

    if len(feasible) >= 2:
        front = pareto_frontier(feasible)
        if len(front) >= 2:
            coords = " ".join(f"{sx(p.nu):.2f},{sy(p.ncte):.2f}" for p in front)
            out.append(f'<polyline class="frontier" points="{coords}" fill="none" stroke="#d4a017" stroke-width="2"/>')
    for p in feasible:
        out.append(
            f'<circle class="point" cx="{sx(p.nu):.2f}" cy="{sy(p.ncte):.2f}" r="4" fill="#1f5fa8">'
            f"<title>{escape(p.label)}: nu={p.nu:.4g}, NCTE={p.ncte:.4g}</title></circle>"
        )
    if hidden:
        note = "no feasible points" if not feasible else f"{hidden} infeasible point(s) not shown"
        out.append(f'<text class="annotation" x="{left + 8}" y="{top + 16}" font-size="12" fill="#a00">{escape(note)}</text>')
    out.append("</svg>")
    doc = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(doc)
    return doc
