"""Two-row dot plots of composite scores (group 2 on top, group 1 below)."""

from __future__ import annotations

from html import escape

import numpy as np

WIDTH = 640
PANEL_HEIGHT = 170
MARGIN_X = 110
RADIUS = 4.0
COLORS = ("#1f77b4", "#d62728")


def _nice_range(values: np.ndarray) -> tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + 1e-12 * step, step)]


def _stack(xs: list[float]) -> list[int]:
    """Stacking level for each dot so dots closer than one diameter do not overlap."""
    levels = [0] * len(xs)
    placed: list[tuple[float, int]] = []
    for i in sorted(range(len(xs)), key=lambda i: (xs[i], i)):
        used = {lvl for x, lvl in placed if abs(x - xs[i]) < 2 * RADIUS}
        lvl = 0
        while lvl in used:
            lvl += 1
        levels[i] = lvl
        placed.append((xs[i], lvl))
    return levels


def dot_plot_svg(panels: list[dict]) -> str:
    """Render panels as one SVG 1.1 document.

    Each panel is ``{"title", "labels": (group1, group2), "u1", "u2"}``.
    Every subject is drawn as exactly one ``<circle>``.
    """
    if not panels:
        raise ValueError("nothing to plot")
    height = PANEL_HEIGHT * len(panels) + 10
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>',
    ]
    for p, panel in enumerate(panels):
        u1 = np.asarray(panel["u1"], dtype=float)
        u2 = np.asarray(panel["u2"], dtype=float)
        both = np.concatenate([u1, u2])
        if both.size == 0:
            raise ValueError(f"panel {panel.get('title', p)!r} has no scores")
        lo, hi = _nice_range(both)
        y0 = PANEL_HEIGHT * p
        x_of = lambda v: MARGIN_X + (v - lo) / (hi - lo) * (WIDTH - MARGIN_X - 20)
        axis_y = y0 + 140
        rows = ((panel["labels"][1], u2, y0 + 60, COLORS[1]), (panel["labels"][0], u1, y0 + 115, COLORS[0]))
        out.append(f'<g class="panel" id="panel{p + 1}">')
        out.append(f'<text x="{WIDTH / 2:.1f}" y="{y0 + 18}" text-anchor="middle" font-size="13">{escape(panel["title"])}</text>')
        for label, vals, ybase, color in rows:
            out.append(f'<text x="10" y="{ybase + 4}">{escape(str(label))}</text>')
            out.append(f'<line x1="{MARGIN_X}" y1="{ybase + RADIUS + 1}" x2="{WIDTH - 20}" y2="{ybase + RADIUS + 1}" stroke="#ccc"/>')
            xs = [x_of(v) for v in vals]
            for x, lvl in zip(xs, _stack(xs)):
                out.append(
                    f'<circle cx="{x:.2f}" cy="{ybase - 2 * RADIUS * lvl:.2f}" r="{RADIUS}" fill="{color}" fill-opacity="0.8"/>'
                )
        out.append(f'<line x1="{MARGIN_X}" y1="{axis_y}" x2="{WIDTH - 20}" y2="{axis_y}" stroke="black"/>')
        for t in _ticks(lo, hi):
            x = x_of(t)
            out.append(f'<line x1="{x:.2f}" y1="{axis_y}" x2="{x:.2f}" y2="{axis_y + 4}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{axis_y + 15}" text-anchor="middle">{t:g}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def dot_plot_ascii(panels: list[dict], width: int = 60) -> str:
    """Monospace version: one line per group, a count per column bin."""
    if not panels:
        raise ValueError("nothing to plot")
    lines = []
    for panel in panels:
        u1 = np.asarray(panel["u1"], dtype=float)
        u2 = np.asarray(panel["u2"], dtype=float)
        both = np.concatenate([u1, u2])
        if both.size == 0:
            raise ValueError(f"panel {panel.get('title')!r} has no scores")
        lo, hi = _nice_range(both)
        labels = [str(panel["labels"][1]), str(panel["labels"][0])]
        pad = max(len(s) for s in labels)
        lines.append(panel["title"])
        for label, vals in zip(labels, (u2, u1)):
            bins = np.clip(((vals - lo) / (hi - lo) * width).astype(int), 0, width - 1)
            counts = np.bincount(bins, minlength=width)
            row = "".join("." if c == 0 else ("o" if c == 1 else (str(c) if c < 10 else "#")) for c in counts)
            lines.append(f"{label:>{pad}} |{row}|")
        left, right = f"{lo:.4g}", f"{hi:.4g}"
        lines.append(" " * pad + "  " + left + " " * max(1, width - len(left) - len(right)) + right)
        lines.append("")
    return "\n".join(lines)
