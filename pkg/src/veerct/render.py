"""Schematic SVG drawings of link windows and tessellation windows.

Ladderpoles are vertical lines and a vertex's height is its time along the
flow, ``log(x / y)`` in quadrant coordinates when those are known and its
position index otherwise.  Drawings are schematic, not metric.  All numbers
are printed with fixed precision so output is byte-stable.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from . import planar as P

COLORS = {"R": "#c0392b", "B": "#2d5fa8"}
BAND = {"R": "#f4d3cf", "B": "#d3def2"}
POLE_GAP = 90.0
UNIT = 40.0
MARGIN = 30.0


def _height(vid, coords) -> float:
    if coords is not None:
        x, y = P.fl(coords[0]), P.fl(coords[1])
        return math.log(x / y)
    # without coordinates time runs against s on even poles
    return -vid[1] if vid[0] % 2 == 0 else vid[1]


def layout(vertices: dict) -> dict:
    """Vertex id -> (x, y) in SVG units, y growing downwards."""
    if not vertices:
        return {}
    hs = {k: _height(k, c) for k, c in vertices.items()}
    top = max(hs.values())
    i0 = min(k[0] for k in vertices)
    return {k: (MARGIN + POLE_GAP * (k[0] - i0), MARGIN + UNIT * (top - h)) for k, h in hs.items()}


def _f(v: float) -> str:
    return f"{v:.2f}"


class _Canvas:
    def __init__(self, pos: dict):
        self.pos = pos
        self.items: list = []

    def line(self, a, b, color, width=1.5, dash=None):
        (x1, y1), (x2, y2) = self.pos[a], self.pos[b]
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                          f'stroke="{color}" stroke-width="{width}"{extra}/>')

    def polygon(self, ids, fill, opacity=1.0):
        pts = " ".join(f"{_f(self.pos[k][0])},{_f(self.pos[k][1])}" for k in ids)
        self.items.append(f'<polygon points="{pts}" fill="{fill}" fill-opacity="{opacity}" stroke="none"/>')

    def dot(self, k, color, r=3.5, title=None):
        x, y = self.pos[k]
        label = f"<title>{escape(title)}</title>" if title else ""
        self.items.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{r}" fill="{color}">{label}</circle>')

    def mark(self, corner, toward, color):
        """A short stroke inside a corner, marking an angle of pi."""
        (x, y) = self.pos[corner]
        cx = sum(self.pos[t][0] for t in toward) / len(toward)
        cy = sum(self.pos[t][1] for t in toward) / len(toward)
        d = math.hypot(cx - x, cy - y) or 1.0
        ex, ey = x + 8 * (cx - x) / d, y + 8 * (cy - y) / d
        self.items.append(f'<line x1="{_f(x)}" y1="{_f(y)}" x2="{_f(ex)}" y2="{_f(ey)}" '
                          f'stroke="{color}" stroke-width="3"/>')

    def render(self, title: str) -> str:
        xs = [p[0] for p in self.pos.values()] or [0.0]
        ys = [p[1] for p in self.pos.values()] or [0.0]
        w, h = max(xs) + MARGIN, max(ys) + MARGIN
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(w)}" height="{_f(h)}" '
                f'viewBox="0 0 {_f(w)} {_f(h)}">')
        return "\n".join([head, f"<title>{escape(title)}</title>", *self.items, "</svg>", ""])


def _other(c: str) -> str:
    return "B" if c == "R" else "R"


def link_svg(w, title: str = "cusp link window") -> str:
    """Ladders of a LinkWindow; a stroke in each triangle marks its pi corner, the tip."""
    pos = layout({k: v.coords for k, v in w.vertices.items()})
    cv = _Canvas(pos)
    for t in w.triangles:
        if t.hinge:
            cv.polygon(t.corners, "#eeeeee")
    for a, b in w.rungs():
        cv.line(a, b, "#777777", 1.0)
    for a, b in w.pole_edges():
        cv.line(a, b, COLORS[_other(w.vertices[a].color)], 2.5)
    for t in w.triangles:
        cv.mark(t.tip, [x for x in t.corners if x != t.tip], "#222222")
    for k, v in sorted(w.vertices.items()):
        cv.dot(k, COLORS[v.color], title=str(k))
    return cv.render(title)


def _ct_canvas(ct, pos):
    cv = _Canvas(pos)
    for key, cell in sorted(ct.cells.items()):
        ring = list(cell.boundary()[0]) + list(cell.boundary()[1][1:-1])
        cv.polygon(ring, BAND[cell.color], 0.9 if cell.complete else 0.4)
    for _, u, v, kind in ct.edges():
        cv.line(u, v, "#333333", 1.5, None if kind == "InFurrow" else "4 3")
    return cv


def ct_svg(ct, title: str = "Cannon-Thurston window") -> str:
    """Cells filled with their furrow colour; cross-furrow edges dashed."""
    pos = layout({k: (None if p.x is None else (p.x, p.y)) for k, p in ct.vertices.items()})
    cv = _ct_canvas(ct, pos)
    for k in sorted(ct.vertices):
        cv.dot(k, COLORS["R" if k[0] % 2 == 0 else "B"], title=str(k))
    return cv.render(title)


def overlay_svg(link, ct, title: str = "tessellation with link skeleton") -> str:
    """The tessellation with the ladderpole edges and rungs of the link drawn over it."""
    verts = {k: v.coords for k, v in link.vertices.items()}
    pos = layout(verts)
    keep = {k: pos[k] for k in ct.vertices if k in pos}
    cv = _ct_canvas(ct, pos)
    for a, b in link.rungs():
        if a in keep and b in keep:
            cv.line(a, b, "#2e8b57", 1.0)
    for a, b in link.pole_edges():
        if a in keep and b in keep:
            cv.line(a, b, COLORS[_other(link.vertices[a].color)], 2.5)
    cv.pos = keep
    for k in sorted(keep):
        cv.dot(k, COLORS[link.vertices[k].color], title=str(k))
    return cv.render(title)
