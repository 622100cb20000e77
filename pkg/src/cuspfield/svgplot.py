"""Minimal deterministic SVG writer for log-log scaling plots.

Fixed canvas, decade ticks, scatter points and the fitted power law with its
slope printed in the corner.  All coordinates are formatted with explicit
precision so a given input always produces byte-identical output; no plotting
dependency is involved.
"""

from __future__ import annotations

import math

from .fitting import fit_loglog

WIDTH, HEIGHT = 640.0, 480.0
LEFT, RIGHT, TOP, BOTTOM = 78.0, 26.0, 46.0, 58.0


def _axis(lo: float, hi: float) -> tuple[float, float, list[int]]:
    """Padded log10 range plus the decade exponents falling inside it."""
    span = hi - lo
    pad = 0.05 * span if span > 0 else 0.5
    lo, hi = lo - pad, hi + pad
    decades = [k for k in range(math.ceil(lo), math.floor(hi) + 1)]
    return lo, hi, decades


def render_loglog(
    rows: list[tuple[float, float]],
    title: str,
    xlabel: str,
    ylabel: str,
) -> str:
    """Scatter the (x, y) rows in log-log axes with their least-squares power law."""
    if len(rows) < 2:
        raise ValueError(f"need at least 2 rows to plot, got {len(rows)}")
    xs = [float(r[0]) for r in rows]
    ys = [float(r[1]) for r in rows]
    if min(xs) <= 0 or min(ys) <= 0:
        raise ValueError("log-log plot needs positive data")
    fit = fit_loglog(xs, ys, min_points=2)

    lx = [math.log10(v) for v in xs]
    ly = [math.log10(v) for v in ys]
    x_lo, x_hi, x_ticks = _axis(min(lx), max(lx))
    y_lo, y_hi, y_ticks = _axis(min(ly), max(ly))

    def px(v: float) -> float:
        return LEFT + (v - x_lo) / (x_hi - x_lo) * (WIDTH - LEFT - RIGHT)

    def py(v: float) -> float:
        return HEIGHT - BOTTOM - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - TOP - BOTTOM)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0f}" height="{HEIGHT:.0f}" '
        f'viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">',
        f'<rect width="{WIDTH:.0f}" height="{HEIGHT:.0f}" fill="white"/>',
        f'<text x="{LEFT:.1f}" y="24" font-family="monospace" font-size="15">{title}</text>',
    ]
    for k in x_ticks:
        x = px(float(k))
        out.append(
            f'<line x1="{x:.2f}" y1="{TOP:.1f}" x2="{x:.2f}" y2="{HEIGHT - BOTTOM:.1f}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{HEIGHT - BOTTOM + 20:.1f}" font-family="monospace" '
            f'font-size="12" text-anchor="middle">1e{k}</text>'
        )
    for k in y_ticks:
        y = py(float(k))
        out.append(
            f'<line x1="{LEFT:.1f}" y1="{y:.2f}" x2="{WIDTH - RIGHT:.1f}" y2="{y:.2f}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{LEFT - 8:.1f}" y="{y + 4:.2f}" font-family="monospace" '
            f'font-size="12" text-anchor="end">1e{k}</text>'
        )
    out.append(
        f'<rect x="{LEFT:.1f}" y="{TOP:.1f}" width="{WIDTH - LEFT - RIGHT:.1f}" '
        f'height="{HEIGHT - TOP - BOTTOM:.1f}" fill="none" stroke="black" stroke-width="1"/>'
    )

    ln10 = math.log(10.0)
    f_lo = (fit.intercept + fit.slope * min(lx) * ln10) / ln10
    f_hi = (fit.intercept + fit.slope * max(lx) * ln10) / ln10
    out.append(
        f'<line x1="{px(min(lx)):.2f}" y1="{py(f_lo):.2f}" x2="{px(max(lx)):.2f}" '
        f'y2="{py(f_hi):.2f}" stroke="#c02020" stroke-width="1.5"/>'
    )
    for vx, vy in zip(lx, ly):
        out.append(
            f'<circle cx="{px(vx):.2f}" cy="{py(vy):.2f}" r="3.5" fill="none" '
            'stroke="#1040a0" stroke-width="1.5"/>'
        )
    out.append(
        f'<text x="{WIDTH - RIGHT:.1f}" y="24" font-family="monospace" font-size="14" '
        f'text-anchor="end">slope = {fit.slope:.4f}</text>'
    )
    out.append(
        f'<text x="{(LEFT + WIDTH - RIGHT) / 2:.1f}" y="{HEIGHT - 12:.1f}" '
        f'font-family="monospace" font-size="13" text-anchor="middle">{xlabel}</text>'
    )
    out.append(
        f'<text x="20" y="{(TOP + HEIGHT - BOTTOM) / 2:.1f}" font-family="monospace" '
        f'font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 20 {(TOP + HEIGHT - BOTTOM) / 2:.1f})">{ylabel}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_csv_plot(csv_text: str, title: str) -> str:
    """Plot the first two columns of a small CSV (header line required)."""
    lines = [ln for ln in csv_text.strip().split("\n") if ln]
    if len(lines) < 3:
        raise ValueError("csv too short to plot")
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        rows.append((float(cells[0]), float(cells[1])))
    return render_loglog(rows, title, header[0], header[1])
