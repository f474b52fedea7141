"""Minimal SVG 1.1 writers for region maps, bound progress and runtime boxplots."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

W, H = 480, 360
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 30, 50
COLORS = {"strong": "#2ca02c", "weak": "#ff7f0e", "outside": "#bbbbbb"}


def _doc(body: list, title: str) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">\n'
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>\n'
        f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi == xlo:
            xlo, xhi = xlo - 0.5, xhi + 0.5
        if yhi == ylo:
            ylo, yhi = ylo - 0.5, yhi + 0.5
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi

    def x(self, v):
        return LEFT + (v - self.xlo) / (self.xhi - self.xlo) * (W - LEFT - RIGHT)

    def y(self, v):
        return H - BOTTOM - (v - self.ylo) / (self.yhi - self.ylo) * (H - TOP - BOTTOM)

    def axes(self, xlabel, ylabel, xticks=None, yticks=None) -> list:
        out = [
            f'<line x1="{LEFT}" y1="{H - BOTTOM}" x2="{W - RIGHT}" y2="{H - BOTTOM}" stroke="black"/>',
            f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{H - BOTTOM}" stroke="black"/>',
            f'<text x="{(LEFT + W - RIGHT) / 2}" y="{H - 10}" text-anchor="middle" font-size="12">'
            f'{escape(xlabel)}</text>',
            f'<text x="15" y="{(TOP + H - BOTTOM) / 2}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 15 {(TOP + H - BOTTOM) / 2})">{escape(ylabel)}</text>',
        ]
        for v in xticks if xticks is not None else np.linspace(self.xlo, self.xhi, 5):
            out.append(f'<text x="{self.x(v):.1f}" y="{H - BOTTOM + 15}" text-anchor="middle" '
                       f'font-size="10">{_fmt(v)}</text>')
        for v in yticks if yticks is not None else np.linspace(self.ylo, self.yhi, 5):
            out.append(f'<text x="{LEFT - 5}" y="{self.y(v) + 3:.1f}" text-anchor="end" '
                       f'font-size="10">{_fmt(v)}</text>')
        return out


def _fmt(v) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else f"{v:.2g}"


def region_map_svg(region, title: str = "Counterfactual regions") -> str:
    """Crosses colored by label for a grid with exactly two varying coordinates."""
    if len(region.axes) != 2:
        raise ValueError("a region map plot needs exactly two varying coordinates")
    pts = region.points
    # first axis vertical, second horizontal
    f = _Frame(pts[:, 1].min(), pts[:, 1].max(), pts[:, 0].min(), pts[:, 0].max())
    body = f.axes(region.axes[1], region.axes[0], sorted(set(pts[:, 1].tolist())),
                  sorted(set(pts[:, 0].tolist())))
    present = region.present.params
    for (u, v), lab, val in zip(pts.tolist(), region.labels, region.values):
        cx, cy = f.x(v), f.y(u)
        col = COLORS[str(lab)]
        body.append(f'<path d="M{cx - 5:.1f},{cy - 5:.1f} L{cx + 5:.1f},{cy + 5:.1f} '
                    f'M{cx - 5:.1f},{cy + 5:.1f} L{cx + 5:.1f},{cy - 5:.1f}" stroke="{col}" '
                    f'stroke-width="2"/>')
        if val is not None:
            body.append(f'<text x="{cx + 7:.1f}" y="{cy - 6:.1f}" font-size="9">{val}</text>')
    here = [_coord(present, name) for name in region.axes]
    body.append(f'<circle cx="{f.x(here[1]):.1f}" cy="{f.y(here[0]):.1f}" r="8" fill="none" '
                f'stroke="black" stroke-width="2"/>')
    return _doc(body, title)


def _coord(params, name):
    if name == "b":
        return params.b
    vec = params.c if name[0] == "c" else params.a
    return vec[int(name[1:])]


def progress_svg(series: list, title: str = "Bound progress") -> str:
    """``series``: list of (xs, primal, dual) with x in [0, 1] and bounds relative to the optimum.

    Missing bounds are None and are skipped.
    """
    ys = [v for _, prim, dual in series for v in list(prim) + list(dual) if v is not None]
    ylo = min([0.0] + ys)
    yhi = max([1.0] + ys)
    f = _Frame(0.0, 1.0, ylo, yhi)
    body = f.axes("fraction of candidate values", "bound / optimum")
    for xs, prim, dual in series:
        for vals, col in ((prim, "#d62728"), (dual, "#1f77b4")):
            pts = [(f.x(x), f.y(v)) for x, v in zip(xs, vals) if v is not None]
            if len(pts) >= 2:
                d = " ".join(f"{px:.1f},{py:.1f}" for px, py in pts)
                body.append(f'<polyline points="{d}" fill="none" stroke="{col}" stroke-opacity="0.6"/>')
            elif pts:
                body.append(f'<circle cx="{pts[0][0]:.1f}" cy="{pts[0][1]:.1f}" r="2" fill="{col}"/>')
    return _doc(body, title)


def boxplot_svg(groups: dict, title: str = "Runtime", ylabel: str = "seconds") -> str:
    """One box (quartiles, median, min-max whiskers) per group label."""
    labels = list(groups)
    allv = [v for vals in groups.values() for v in vals]
    f = _Frame(-0.5, max(len(labels), 1) - 0.5, 0.0, max(allv) * 1.05 if allv else 1.0)
    body = f.axes("", ylabel, xticks=[])
    for k, lab in enumerate(labels):
        vals = np.asarray(groups[lab], dtype=float)
        cx = f.x(k)
        body.append(f'<text x="{cx:.1f}" y="{H - BOTTOM + 15}" text-anchor="middle" '
                    f'font-size="10">{escape(str(lab))}</text>')
        if not vals.size:
            continue
        q0, q1, q2, q3, q4 = np.percentile(vals, [0, 25, 50, 75, 100])
        half = 0.3 * (f.x(1) - f.x(0)) if len(labels) > 1 else 40
        body.append(f'<line x1="{cx:.1f}" y1="{f.y(q0):.1f}" x2="{cx:.1f}" y2="{f.y(q4):.1f}" stroke="black"/>')
        body.append(f'<rect x="{cx - half:.1f}" y="{f.y(q3):.1f}" width="{2 * half:.1f}" '
                    f'height="{max(f.y(q1) - f.y(q3), 0.5):.1f}" fill="#9ecae1" stroke="black"/>')
        body.append(f'<line x1="{cx - half:.1f}" y1="{f.y(q2):.1f}" x2="{cx + half:.1f}" '
                    f'y2="{f.y(q2):.1f}" stroke="black" stroke-width="2"/>')
    return _doc(body, title)
