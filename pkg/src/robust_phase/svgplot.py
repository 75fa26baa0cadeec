"""Minimal self-contained SVG plots (no plotting dependency).

Only what the experiment harness needs: log-log scatter with a fitted
slope annotation, and grouped bars.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 60


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class _Canvas:
    def __init__(self, title: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="12">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{_esc(title)}</text>',
        ]

    def line(self, x1, y1, x2, y2, color="black", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="{color}" stroke-width="{width}"{d}/>')

    def circle(self, x, y, r=3.5, color="#1f6fb2"):
        self.parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r}" fill="{color}"/>')

    def rect(self, x, y, w, h, color):
        self.parts.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{w:.1f}" height="{h:.1f}" fill="{color}"/>')

    def text(self, x, y, s, anchor="middle", color="black", size=12, rotate=None):
        r = f' transform="rotate({rotate} {x:.1f} {y:.1f})"' if rotate is not None else ""
        self.parts.append(
            f'<text x="{x:.1f}" y="{y:.1f}" text-anchor="{anchor}" fill="{color}" '
            f'font-size="{size}"{r}>{_esc(s)}</text>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"])


def _log_ticks(lo: float, hi: float):
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    return [10.0**e for e in range(lo_e, hi_e + 1)]


def loglog_fit_plot(path, xs, ys, *, title, xlabel, ylabel, point_labels=None) -> None:
    """Scatter of (xs, ys) on log-log axes with a least-squares power-law
    fit drawn and its slope annotated."""
    xs = [float(v) for v in xs]
    ys = [max(float(v), 1e-300) for v in ys]
    lx = [math.log10(v) for v in xs]
    ly = [math.log10(v) for v in ys]
    n = len(xs)
    mx, my = sum(lx) / n, sum(ly) / n
    sxx = sum((v - mx) ** 2 for v in lx)
    slope = sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sxx if sxx > 0 else 0.0
    inter = my - slope * mx

    x_lo, x_hi = min(xs) / 1.3, max(xs) * 1.3
    y_lo, y_hi = min(ys) / 1.6, max(ys) * 1.6
    px0, px1 = MARGIN_L, WIDTH - MARGIN_R
    py0, py1 = HEIGHT - MARGIN_B, MARGIN_T

    def sx(v):
        return px0 + (math.log10(v) - math.log10(x_lo)) / (math.log10(x_hi) - math.log10(x_lo)) * (px1 - px0)

    def sy(v):
        return py0 + (math.log10(v) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo)) * (py1 - py0)

    c = _Canvas(title)
    c.line(px0, py0, px1, py0)
    c.line(px0, py0, px0, py1)
    for t in _log_ticks(x_lo, x_hi):
        if x_lo <= t <= x_hi:
            c.line(sx(t), py0, sx(t), py0 + 5)
            c.text(sx(t), py0 + 20, f"{t:g}")
    for t in _log_ticks(y_lo, y_hi):
        if y_lo <= t <= y_hi:
            c.line(px0 - 5, sy(t), px0, sy(t))
            c.text(px0 - 8, sy(t) + 4, f"{t:g}", anchor="end")
    c.text((px0 + px1) / 2, HEIGHT - 15, xlabel)
    c.text(18, (py0 + py1) / 2, ylabel, rotate=-90)

    fy0 = 10 ** (inter + slope * math.log10(x_lo))
    fy1 = 10 ** (inter + slope * math.log10(x_hi))
    c.line(sx(x_lo), sy(max(fy0, y_lo)), sx(x_hi), sy(min(fy1, y_hi)), color="#b22222", dash="5,4")
    for i, (x, y) in enumerate(zip(xs, ys)):
        c.circle(sx(x), sy(y))
        if point_labels:
            c.text(sx(x), sy(y) - 8, str(point_labels[i]), size=10)
    c.text(px1 - 5, py1 + 15, f"fitted slope {slope:.3f}", anchor="end", color="#b22222")
    with open(path, "w") as fh:
        fh.write(c.render())


def bar_plot(path, labels, values, *, title, ylabel, colors=None) -> None:
    vals = [float(v) for v in values]
    v_hi = max(vals) * 1.15 if vals else 1.0
    px0, px1 = MARGIN_L, WIDTH - MARGIN_R
    py0, py1 = HEIGHT - MARGIN_B, MARGIN_T
    c = _Canvas(title)
    c.line(px0, py0, px1, py0)
    c.line(px0, py0, px0, py1)
    n = len(vals)
    slot = (px1 - px0) / max(n, 1)
    for i, (lab, v) in enumerate(zip(labels, vals)):
        h = (v / v_hi) * (py0 - py1)
        x = px0 + i * slot + slot * 0.2
        color = (colors or ["#1f6fb2"])[i % len(colors or ["#1f6fb2"])]
        c.rect(x, py0 - h, slot * 0.6, h, color)
        c.text(x + slot * 0.3, py0 + 18, str(lab))
        c.text(x + slot * 0.3, py0 - h - 6, f"{v:.3g}", size=10)
    c.text(18, (py0 + py1) / 2, ylabel, rotate=-90)
    with open(path, "w") as fh:
        fh.write(c.render())
