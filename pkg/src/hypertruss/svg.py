"""Wireframe drawings of undeformed and deformed trusses."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .model import Candidate, TrussModel, deformed_coordinates

PANEL = 360.0
MARGIN = 20.0
UNDEFORMED = "#000000"
DEFORMED = "#1f4fd8"


def _fmt(v: float) -> str:
    v = round(float(v), 3)
    return f"{v + 0.0:.3f}"


def _panel(model, shapes, axes, x0, title):
    """One projection panel; ``axes`` picks the horizontal and vertical coordinate."""
    pts = np.vstack([s[:, axes] for s, _ in shapes])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = max(float((hi - lo).max()), 1e-9)
    scale = (PANEL - 2 * MARGIN) / span
    mid = (lo + hi) / 2

    def xy(p):
        sx = x0 + PANEL / 2 + (p[0] - mid[0]) * scale
        sy = PANEL / 2 - (p[1] - mid[1]) * scale + MARGIN
        return _fmt(sx), _fmt(sy)

    out = [f'<text x="{_fmt(x0 + MARGIN)}" y="{_fmt(MARGIN)}" font-size="12">{title}</text>']
    a, b = model.member_ends
    for coords, colour in shapes:
        P = coords[:, axes]
        for i, j in zip(a, b):
            (x1, y1), (x2, y2) = xy(P[i]), xy(P[j])
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                       f'stroke="{colour}" stroke-width="1.2"/>')
    # deformed nodes carry their model coordinates for downstream tools
    for node, p in zip(model.nodes, shapes[-1][0]):
        cx, cy = xy(p[axes])
        out.append(f'<circle cx="{cx}" cy="{cy}" r="2" fill="{shapes[-1][1]}" '
                   f'data-node="{node.id}" data-x="{_fmt(p[0])}" data-y="{_fmt(p[1])}" '
                   f'data-z="{_fmt(p[2])}"/>')
    return out


def render_svg(model: TrussModel, candidate: Candidate) -> str:
    """SVG text with side (x-z) and top (x-y) views.

    The undeformed wireframe is black and the deformed one blue; both panels
    share a scale fitted to the union of the two shapes.
    """
    base = model.coords
    moved = deformed_coordinates(model, candidate)
    shapes = [(base, UNDEFORMED), (moved, DEFORMED)]
    width, height = 2 * PANEL, PANEL + 2 * MARGIN
    body = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<title>{model.name or "truss"} lambda={candidate.lam!r}</title>',
    ]
    body += _panel(model, shapes, [0, 2], 0.0, "side (x-z)")
    body += _panel(model, shapes, [0, 1], PANEL, "top (x-y)")
    body.append("</svg>")
    return "\n".join(body) + "\n"


def emit_svg(model: TrussModel, candidate: Candidate, path) -> Path:
    path = Path(path)
    path.write_text(render_svg(model, candidate))
    return path
