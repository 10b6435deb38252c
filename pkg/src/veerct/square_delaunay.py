"""Delaunay cellulations for the square (L-infinity) metric.

A "square at aspect rho" is an axis-parallel rectangle with height = rho * width;
rho = 1 gives honest squares.  Maximal empty squares are found by growing a square
from a singularity, and neighbouring cells by pushing a square across an edge.
The planar core works on explicit point lists; the surface drivers feed it the
singularities visible in a development.
"""
from __future__ import annotations

from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import planar as P
from .flat_surface import (
    ConeSurface, DevelopedChart, Found, Location, QuadrantBase, VertexHit,
    canonical_location, check_no_axis_saddle, develop_from_point, develop_sector,
    reference_corner,
)

SIDES = ("bottom", "right", "top", "left")
_CORNER_SIDES = {"bl": ("bottom", "left"), "br": ("bottom", "right"),
                 "tr": ("top", "right"), "tl": ("top", "left")}


class SaddleConnectionSuspected(ValueError):
    """Two singularities share a side of an empty square (an axis-parallel connection)."""


class NotDelaunayEdge(ValueError):
    pass


class _NeedMore(Exception):
    pass


class UnboundedSquare(ValueError):
    """In a finite point set, the square can grow without ever meeting another point."""


# ---------------------------------------------------------------------------
# squares
# ---------------------------------------------------------------------------

@dataclass
class BoundaryPoint:
    point: tuple
    vertex: Optional[int] = None
    sides: tuple = ()


@dataclass
class MaxSquare:
    corner: tuple  # lower-left
    width: object
    height: object
    boundary: list
    chart: Optional[DevelopedChart] = None

    @property
    def kind(self) -> str:
        return {2: "Edge", 3: "Triangle", 4: "Quad"}.get(len(self.boundary), "Degenerate")

    def sides_of(self, p) -> tuple:
        x0, y0 = self.corner
        x1, y1 = x0 + self.width, y0 + self.height
        out = []
        if p[1] == y0 and x0 <= p[0] <= x1:
            out.append("bottom")
        if p[0] == x1 and y0 <= p[1] <= y1:
            out.append("right")
        if p[1] == y1 and x0 <= p[0] <= x1:
            out.append("top")
        if p[0] == x0 and y0 <= p[1] <= y1:
            out.append("left")
        return tuple(out)

    def contains_strictly(self, p) -> bool:
        x0, y0 = self.corner
        return x0 < p[0] < x0 + self.width and y0 < p[1] < y0 + self.height

    def contains_closed(self, p) -> bool:
        x0, y0 = self.corner
        return x0 <= p[0] <= x0 + self.width and y0 <= p[1] <= y0 + self.height

    def hull(self) -> list:
        """Boundary singularities in counterclockwise order around the square."""
        x0, y0 = self.corner
        x1, y1 = x0 + self.width, y0 + self.height

        def pos(b):
            p = b.point
            if p[1] == y0 and p[0] != x0:
                return (0, P.fl(p[0]))
            if p[0] == x1:
                return (1, P.fl(p[1]))
            if p[1] == y1:
                return (2, -P.fl(p[0]))
            return (3, -P.fl(p[1]))

        return sorted(self.boundary, key=pos)

    def corners(self) -> list:
        x0, y0 = self.corner
        x1, y1 = x0 + self.width, y0 + self.height
        return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def _finish(sq: MaxSquare, shared_ok: tuple = ()):
    """Record sides; two singularities on one side means an axis-parallel connection.

    ``shared_ok`` lists point keys allowed to share a side (an axis-parallel input edge).
    """
    per_side = Counter()
    for b in sq.boundary:
        b.sides = sq.sides_of(b.point)
        if not b.sides:
            raise AssertionError("boundary point off the square")
        if P.key(b.point) in shared_ok[1:]:
            continue
        for s in b.sides:
            per_side[s] += 1
    crowded = [s for s, n in per_side.items() if n > 1]
    if crowded:
        raise SaddleConnectionSuspected(f"side(s) {crowded} of an empty square hold two singularities")
    return sq


def _is_maximal(sq: MaxSquare) -> Optional[str]:
    """None if maximal, else a corner name from which the square can still grow."""
    for name in ("bl", "br", "tr", "tl"):
        allowed = _CORNER_SIDES[name]
        if all(any(s in allowed for s in sq.sides_of(b.point)) for b in sq.boundary):
            return name
    return None


def _corner_point(sq: MaxSquare, name: str):
    x0, y0 = sq.corner
    x1, y1 = x0 + sq.width, y0 + sq.height
    return {"bl": (x0, y0), "br": (x1, y0), "tr": (x1, y1), "tl": (x0, y1)}[name]


def _opposite(name):
    return {"bl": "tr", "br": "tl", "tr": "bl", "tl": "br"}[name]


def _scale_from_corner(sq: MaxSquare, name: str, pts):
    """Scale about a corner until the square first meets another point."""
    c = _corner_point(sq, name)
    o = _corner_point(sq, _opposite(name))
    ox, oy = o[0] - c[0], o[1] - c[1]
    on = {P.key(b.point) for b in sq.boundary}
    best, hits = None, []
    for q in pts:
        if P.key(q.point) in on:
            continue
        a = (q.point[0] - c[0]) / ox
        b = (q.point[1] - c[1]) / oy
        if a.sign() < 0 or b.sign() < 0:
            continue
        s = a if a >= b else b
        if s <= 1:
            if sq.contains_strictly(q.point):
                raise AssertionError("empty square contains a point")
            continue
        if best is None or s < best:
            best, hits = s, [q]
        elif s == best:
            hits.append(q)
    if best is None:
        raise _NeedMore()
    nx = c[0] + ox * best
    ny = c[1] + oy * best
    x0 = c[0] if c[0] <= nx else nx
    y0 = c[1] if c[1] <= ny else ny
    return MaxSquare((x0, y0), sq.width * best, sq.height * best,
                     sq.boundary + [BoundaryPoint(h.point, h.vertex) for h in hits], sq.chart)


def grow_in_plane(p: BoundaryPoint, pts, rho) -> MaxSquare:
    """Two-phase growth of an empty square with p on its bottom side.

    ``pts`` are the candidate singularities strictly above p.  Raises _NeedMore if
    no bump is found among them.
    """
    best, hits = None, []
    for q in pts:
        dx = q.point[0] - p.point[0]
        dy = q.point[1] - p.point[1]
        if dy.sign() <= 0:
            continue
        a = abs(dx) * 2
        b = dy / rho
        s = a if a >= b else b
        if best is None or s < best:
            best, hits = s, [q]
        elif s == best:
            hits.append(q)
    if best is None:
        raise _NeedMore()
    sq = MaxSquare((p.point[0] - best / 2, p.point[1]), best, best * rho,
                   [BoundaryPoint(p.point, p.vertex)] + [BoundaryPoint(h.point, h.vertex) for h in hits])
    for _ in range(8):
        corner = _is_maximal(sq)
        if corner is None:
            return _finish(sq)
        sq = _scale_from_corner(sq, corner, pts)
    raise AssertionError("square growth did not stabilise")


def across_in_plane(a: BoundaryPoint, b: BoundaryPoint, pts, rho) -> MaxSquare:
    """Extremal square through a and b, pushed to the left of the directed segment a -> b."""
    d = P.sub(b.point, a.point)
    sx, sy = P.sgn(d[0]), P.sgn(d[1])
    if sx == 0 and sy == 0:
        raise ValueError("edge has coincident endpoints")
    shared = (P.key(a.point), P.key(b.point)) if sx == 0 or sy == 0 else ()
    # an axis-parallel edge is the limit of the generic family; pick the limit side
    sx = sx or 1
    sy = sy or 1
    if sx * sy > 0:
        mx, my = sx, sy
        A, B = a, b
    else:
        mx, my = -sx, -sy
        A, B = b, a

    def fwd(p):
        return (p[0] * mx, p[1] * my)

    A2, B2 = fwd(A.point), fwd(B.point)
    ax, ay = A2
    bx, by = B2
    dx, dy = bx - ax, by - ay
    steep = dy >= dx * rho
    w_slide = dy / rho if steep else dx
    h_min = dy if steep else dx * rho
    seg = (dx, dy)
    best, hits = None, []
    for q in pts:
        qp = fwd(q.point)
        if P.sgn(P.cross(seg, P.sub(qp, A2))) <= 0:
            continue
        tau = None
        if steep:
            if ay <= qp[1] <= by and qp[0] >= bx - w_slide:
                tau = ax - qp[0]
        else:
            if ax <= qp[0] <= bx and qp[1] <= ay + h_min:
                tau = qp[1] - by
        if tau is None:
            if qp[0] > bx or qp[1] < ay:
                continue
            h1 = (bx - qp[0]) * rho
            h2 = qp[1] - ay
            h = h1 if h1 >= h2 else h2
            tau = ax - (bx - h / rho) if steep else ay + h - by
        if tau.sign() <= 0:
            raise NotDelaunayEdge("a singularity lies in every square through the edge")
        if best is None or tau < best:
            best, hits = tau, [q]
        elif tau == best:
            hits.append(q)
    if best is None:
        raise _NeedMore()
    if steep:
        if best <= w_slide - dx:
            x0, y0, w = ax - best, ay, w_slide
        else:
            left = ax - best
            w = bx - left
            x0, y0 = left, ay
    else:
        if best <= ay + h_min - by:
            top = by + best
            x0, y0, w = ax, top - h_min, dx
        else:
            top = by + best
            h = top - ay
            w = h / rho
            x0, y0 = bx - w, ay
    h = w * rho
    # map back (the reflection is an involution)
    c1 = fwd((x0, y0))
    c2 = fwd((x0 + w, y0 + h))
    lo = (c1[0] if c1[0] <= c2[0] else c2[0], c1[1] if c1[1] <= c2[1] else c2[1])
    bnd = [BoundaryPoint(a.point, a.vertex), BoundaryPoint(b.point, b.vertex)]
    bnd += [BoundaryPoint(q.point, q.vertex) for q in hits]
    return _finish(MaxSquare(lo, w, h, bnd), shared)


# ---------------------------------------------------------------------------
# planar mock
# ---------------------------------------------------------------------------

class PlanarMock:
    """A flat plane region with marked points; all points are mutually visible."""

    def __init__(self, points, field):
        self.field = field
        self.points = [BoundaryPoint(tuple(field(c) for c in p), i) for i, p in enumerate(points)]

    def point(self, i) -> BoundaryPoint:
        return self.points[i]


def _check_empty(sq: MaxSquare, pts):
    for q in pts:
        if sq.contains_strictly(q.point):
            raise AssertionError(f"square is not empty: contains {q.point}")


# ---------------------------------------------------------------------------
# surface drivers
# ---------------------------------------------------------------------------

def _sing_points(chart: DevelopedChart) -> list:
    return [BoundaryPoint(s.point, s.vertex) for s in chart.singularities]


def _square_in_box(sq: MaxSquare, box) -> bool:
    return all(P.in_box(c, box) for c in sq.corners())


def grow_max_square(scene, rho, seed, radius=None, cap=None) -> MaxSquare:
    """Maximal empty square grown from a singularity sitting on its bottom side.

    ``scene`` is a ConeSurface (seed: vertex class id or QuadrantBase) or a
    PlanarMock (seed: point index).
    """
    if isinstance(scene, PlanarMock):
        p = scene.point(seed)
        pts = [q for q in scene.points if q is not p]
        try:
            sq = grow_in_plane(p, pts, scene.field(rho))
        except _NeedMore:
            raise UnboundedSquare(f"no maximal square grows from point {seed}") from None
        _check_empty(sq, pts)
        return sq
    surface = scene
    rho = surface.field(rho)
    base = seed if isinstance(seed, QuadrantBase) else QuadrantBase(seed, reference_corner(surface, seed))
    zero = surface.field.zero()
    r = surface.field(radius) if radius is not None else _edge_scale(surface) * 2
    p = BoundaryPoint((zero, zero), base.vertex)
    while True:
        box = (-r, r, zero, r)
        chart = develop_sector(surface, base, -1, 1, box, cap=cap)
        pts = [q for q in _sing_points(chart) if q.point[1].sign() > 0]
        try:
            sq = grow_in_plane(p, pts, rho)
        except _NeedMore:
            r = r * 2
            continue
        if _square_in_box(sq, box):
            sq.chart = chart
            _check_empty(sq, pts)
            return sq
        r = r * 2


def _edge_scale(surface: ConeSurface):
    best = None
    for t in range(len(surface.triangles)):
        for e in range(3):
            u = surface.edge_vector(t, e)
            n = abs(u[0]) if abs(u[0]) >= abs(u[1]) else abs(u[1])
            if best is None or n > best:
                best = n
    return best


def max_square_across(scene, rho, a: BoundaryPoint, b: BoundaryPoint, side: str = "left",
                      chart: Optional[DevelopedChart] = None, cap=None):
    """Extremal square through the edge ab on the given side ("left"/"right" of a -> b).

    For a surface, ``chart`` must be a development (in the plane coordinates of a
    and b) that contains the midpoint of ab; the result carries its own chart
    centred at that midpoint.
    """
    if side == "right":
        a, b = b, a
    elif side != "left":
        raise ValueError("side must be 'left' or 'right'")
    if isinstance(scene, PlanarMock):
        rho = scene.field(rho)
        pts = [q for q in scene.points if P.key(q.point) not in (P.key(a.point), P.key(b.point))]
        try:
            sq = across_in_plane(a, b, pts, rho)
        except _NeedMore:
            raise UnboundedSquare("no point bounds the squares on that side") from None
        _check_empty(sq, pts)
        return sq
    surface = scene
    rho = surface.field(rho)
    m = P.midpoint(a.point, b.point)
    hit = chart.locate(m)
    if isinstance(hit[0], VertexHit):
        raise SaddleConnectionSuspected("edge passes through a singularity")
    loc, sg = hit
    hx, hy = _aspect_box(P.sub(b.point, a.point), rho)
    while True:
        box = (m[0] - hx, m[0] + hx, m[1] - hy, m[1] + hy)
        dev = develop_from_point(surface, loc, None, sign=sg, apex=m, cap=cap, box=box)
        pts = _sing_points(dev)
        try:
            sq = across_in_plane(a, b, pts, rho)
        except _NeedMore:
            hx, hy = hx * 2, hy * 2
            continue
        if _square_in_box(sq, dev.box):
            _check_empty(sq, pts)
            sq.chart = dev
            return sq
        hx, hy = hx * 2, hy * 2


def _aspect_box(d, rho) -> tuple:
    """Rational half-sizes of a box shaped like the rho-squares, twice the smallest one through d."""
    r = P.fl(rho)
    w = max(abs(P.fl(d[0])), abs(P.fl(d[1])) / r)
    return Fraction(2 * w), Fraction(2 * w * r)


# ---------------------------------------------------------------------------
# cellulation
# ---------------------------------------------------------------------------

@dataclass
class DelaunayCell:
    kind: str
    anchor: Location           # canonical location of the centroid
    sign: int                  # chart(anchor.tri) = sign * rel + anchor.point
    rel: tuple                 # vertices relative to the centroid, counterclockwise
    vertices: tuple            # vertex class ids of the surface
    witness: tuple             # (corner rel, width, height) of the witness square

    def key(self) -> tuple:
        return self.anchor.key()

    def area2(self):
        return P.area2(list(self.rel))


@dataclass
class Cellulation:
    surface: ConeSurface
    rho: object
    cells: list
    adjacency: dict            # (cell, edge) -> (cell', edge', sign)

    def n_edges(self) -> int:
        return sum(len(c.rel) for c in self.cells) // 2

    def euler_characteristic(self) -> int:
        verts = {v for c in self.cells for v in c.vertices}
        return len(verts) - self.n_edges() + len(self.cells)

    def is_triangulation(self) -> bool:
        return all(len(c.rel) == 3 for c in self.cells)

    def combinatorics(self) -> tuple:
        """Anchors, shapes and gluings, comparable across scales."""
        return (tuple((c.key(), c.vertices) for c in self.cells),
                tuple(sorted(self.adjacency.items())))

    def to_json(self) -> dict:
        return {
            "rho": self.rho.to_json(),
            "cells": [{"kind": c.kind, "vertices": list(c.vertices),
                       "anchor": {"tri": c.anchor.tri, "point": [x.to_json() for x in c.anchor.point],
                                  "sign": c.sign},
                       "rel": [[x.to_json(), y.to_json()] for x, y in c.rel],
                       "witness": {"corner": [x.to_json() for x in c.witness[0]],
                                   "width": c.witness[1].to_json(), "height": c.witness[2].to_json()}}
                      for c in self.cells],
            "adjacency": [{"a": [k[0], k[1]], "b": [v[0], v[1]], "sign": v[2]}
                          for k, v in sorted(self.adjacency.items()) if k < (v[0], v[1])],
        }


def _rotation_match(rel_stored, rel_found, g) -> Optional[int]:
    """k with g*rel_found[j] == rel_stored[(j + k) % n] for all j."""
    n = len(rel_stored)
    if len(rel_found) != n:
        return None
    keys = [P.key(p) for p in rel_stored]
    mapped = [P.key(P.signed(g, p)) for p in rel_found]
    for k in range(n):
        if all(mapped[j] == keys[(j + k) % n] for j in range(n)):
            return k
    return None


def delaunay(surface: ConeSurface, rho, check_saddles: bool = True, cap=None,
             max_cells: int = 10_000) -> Cellulation:
    """Delaunay cellulation of the surface for squares of aspect rho."""
    rho = surface.field(rho)
    if not rho > 0:
        raise ValueError("aspect must be positive")
    if check_saddles:
        rep = check_no_axis_saddle(surface)
        if isinstance(rep, Found):
            raise SaddleConnectionSuspected(f"axis saddle connection {rep.segment}")
    seed_sq = grow_max_square(surface, rho, 0, cap=cap)
    chart = seed_sq.chart
    if seed_sq.kind == "Edge":
        a, b = seed_sq.hull()
        seed_sq = max_square_across(surface, rho, a, b, "left", chart=chart, cap=cap)
        chart = seed_sq.chart

    cells: list = []
    index: dict = {}
    adjacency: dict = {}
    queue = deque()

    def register(sq: MaxSquare, chart: DevelopedChart):
        """Store the cell witnessed by sq (found in the plane of chart); return (id, g, c, verts)."""
        hull = sq.hull()
        verts = [h.point for h in hull]
        c = P.centroid(verts)
        hit = chart.locate(c)
        if isinstance(hit[0], VertexHit):
            raise AssertionError("cell centroid at a singularity")
        loc, sg = hit
        canon, flip = canonical_location(surface, loc)
        sg = sg * flip
        k = canon.key()
        if k in index:
            cid = index[k]
            cell = cells[cid]
            g = cell.sign * sg
            rot = _rotation_match(cell.rel, [P.sub(v, c) for v in verts], g)
            if rot is None:
                raise AssertionError("cell found twice with different shapes")
            return cid, g, c, verts, rot, False
        rel = tuple(P.sub(v, c) for v in verts)
        vids = []
        for v in verts:
            vh = chart.locate(v)
            vids.append(vh[0].vertex if isinstance(vh[0], VertexHit) else hull[verts.index(v)].vertex)
        wit = (P.sub(sq.corner, c), sq.width, sq.height)
        kind = {3: "Triangle", 4: "Quad"}.get(len(verts), "Polygon")
        cells.append(DelaunayCell(kind, canon, sg, rel, tuple(vids), wit))
        cid = len(cells) - 1
        index[k] = cid
        if len(cells) > max_cells:
            raise RuntimeError("too many Delaunay cells")
        queue.append((cid, chart, c, verts, hull))
        return cid, 1, c, verts, 0, True

    register(seed_sq, chart)
    while queue:
        cid, chart, c, verts, hull = queue.popleft()
        n = len(verts)
        g_here = 1  # the plane of chart is this cell's stored frame up to translation
        for i in range(n):
            if (cid, i) in adjacency:
                continue
            a, b = hull[i], hull[(i + 1) % n]
            sq = max_square_across(surface, rho, a, b, "right", chart=chart, cap=cap)
            nid, g, c2, verts2, rot, _ = register(sq, sq.chart)
            # edge b -> a in the new cell
            j = next(j for j in range(len(verts2))
                     if P.key(verts2[j]) == P.key(b.point) and P.key(verts2[(j + 1) % len(verts2)]) == P.key(a.point))
            j = (j + rot) % len(verts2)
            sign = g_here * g
            adjacency[(cid, i)] = (nid, j, sign)
            adjacency[(nid, j)] = (cid, i, sign)
    return Cellulation(surface, rho, cells, adjacency)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class CellulationReport:
    ok: bool
    failures: list = field(default_factory=list)


def _cell_chart(surface, cell: DelaunayCell, cap=None) -> DevelopedChart:
    zero = surface.field.zero()
    # a box twice the bounding box of the cell, rounded outward to rationals
    hx = Fraction(2 * max(abs(P.fl(p[0])) for p in cell.rel)) * Fraction(17, 16)
    hy = Fraction(2 * max(abs(P.fl(p[1])) for p in cell.rel)) * Fraction(17, 16)
    return develop_from_point(surface, cell.anchor, None, sign=cell.sign, apex=(zero, zero), cap=cap,
                              box=(-hx, hx, -hy, hy))


def validate_cellulation(c: Cellulation, cap=None) -> CellulationReport:
    surface = c.surface
    failures = []
    # adjacency is an involution and every edge has a partner
    for cid, cell in enumerate(c.cells):
        for i in range(len(cell.rel)):
            if (cid, i) not in c.adjacency:
                failures.append(f"cell {cid} edge {i} has no neighbour")
                continue
            n2, j, s = c.adjacency[(cid, i)]
            if c.adjacency.get((n2, j)) != (cid, i, s):
                failures.append(f"cell {cid} edge {i}: adjacency not symmetric")
    # each edge of S is the side of exactly two cells
    counts = Counter()
    pieces = defaultdict(list)
    for cid, cell in enumerate(c.cells):
        chart = _cell_chart(surface, cell, cap)
        n = len(cell.rel)
        for i in range(n):
            m = P.midpoint(cell.rel[i], cell.rel[(i + 1) % n])
            hit = chart.locate(m)
            if isinstance(hit[0], VertexHit):
                failures.append(f"cell {cid} edge {i} midpoint is singular")
                continue
            canon, _ = canonical_location(surface, hit[0])
            counts[canon.key()] += 1
        poly = list(cell.rel)
        for cp, vis in chart.visible_pieces():
            part = P.clip_convex(vis, poly)
            if part:
                pieces[cp.tri].append((cid, [cp.to_chart(w) for w in part]))
    bad = {k: n for k, n in counts.items() if n != 2}
    if bad:
        failures.append(f"{len(bad)} edge(s) bound a number of cells other than two: {sorted(bad.values())}")
    total = surface.field.zero()
    for cell in c.cells:
        total = total + cell.area2()
    if total != surface.area() * 2:
        failures.append(f"area mismatch: cells {P.fl(total) / 2} vs surface {P.fl(surface.area())}")
    for t, lst in pieces.items():
        for x in range(len(lst)):
            for y in range(x + 1, len(lst)):
                px, py = lst[x][1], lst[y][1]
                if _orient_ccw(px) and _orient_ccw(py) and P.convex_interiors_overlap(_ccw(px), _ccw(py)):
                    failures.append(f"cells {lst[x][0]} and {lst[y][0]} overlap in triangle {t}")
    return CellulationReport(not failures, failures)


def _orient_ccw(poly) -> bool:
    return len(poly) >= 3 and P.area2(poly).sign() != 0


def _ccw(poly):
    return poly if P.area2(poly).sign() > 0 else list(reversed(poly))


def cellulation_surface(c: Cellulation) -> ConeSurface:
    """The Delaunay triangulation as a surface in its own right (triangle cells only)."""
    from .flat_surface import Gluing
    if not c.is_triangulation():
        raise ValueError("cellulation has non-triangular cells")
    gl = []
    for (a, i), (b, j, s) in sorted(c.adjacency.items()):
        if (a, i) < (b, j):
            gl.append(Gluing((a, i), (b, j), s))
    return ConeSurface(c.surface.field, [cell.rel for cell in c.cells], gl)
