"""Half-translation surfaces given by glued triangles, and straight-line development.

Coordinates are exact field elements.  A gluing identifies edge ``e`` of
triangle ``t`` with edge ``e'`` of triangle ``t'`` by a map ``z -> c + sign*z``
that reverses the edge direction.  Edge ``k`` of a triangle runs from vertex
``k`` to vertex ``k+1``; triangles are counterclockwise.

The development routines unfold the surface into the plane along straight lines
from a base point, keeping only what is visible from it.  Every developed copy
remembers the wedge of directions through which it is seen, so point location
inside a development is always on the correct sheet.
"""
from __future__ import annotations

import heapq
import os
from dataclasses import dataclass
from typing import Optional

from . import planar as P
from .algebraics import AlgebraicReal, NumberField

DEFAULT_CELL_CAP = 1_000_000

UP = (0, 1)
RIGHT = (1, 0)
DOWN = (0, -1)
LEFT = (-1, 0)
AXES = (UP, RIGHT, DOWN, LEFT)  # clockwise order, ray i = AXES[i % 4]


class SurfaceError(ValueError):
    pass


class EdgeLengthMismatch(SurfaceError):
    pass


class NonOrientable(SurfaceError):
    pass


class UnmarkedConePoint(SurfaceError):
    pass


class DisconnectedSurface(SurfaceError):
    pass


class MalformedSurface(SurfaceError):
    pass


class BudgetExhausted(RuntimeError):
    """A development needed more triangle copies than the configured cap."""


class NotHyperbolic(ValueError):
    pass


class NotUnimodular(ValueError):
    pass


def cell_cap() -> int:
    raw = os.environ.get("VEER_CELL_CAP")
    return int(raw) if raw else DEFAULT_CELL_CAP


# ---------------------------------------------------------------------------
# surface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gluing:
    a: tuple
    b: tuple
    sign: int


class ConeSurface:
    """A closed half-translation surface with marked vertex classes."""

    def __init__(self, field: NumberField, triangles, gluings, marked=None):
        self.field = field
        self.triangles = tuple(tuple((field(x), field(y)) for x, y in tri) for tri in triangles)
        self.gluings = tuple(gluings)
        self.glue: dict[tuple, tuple] = {}
        for g in self.gluings:
            a, b = tuple(g.a), tuple(g.b)
            if g.sign not in (1, -1):
                raise MalformedSurface(f"gluing sign must be +-1, got {g.sign}")
            for end in (a, b):
                if not (0 <= end[0] < len(self.triangles) and 0 <= end[1] < 3):
                    raise MalformedSurface(f"gluing refers to missing edge {end}")
                if end in self.glue:
                    raise MalformedSurface(f"edge {end} glued twice")
            if a == b:
                raise MalformedSurface(f"edge {a} glued to itself")
            self.glue[a] = (b[0], b[1], g.sign)
            self.glue[b] = (a[0], a[1], g.sign)
        self._validate_geometry()
        self.corner_class = self._vertex_classes()
        self.n_vertices = 1 + max(self.corner_class.values())
        self.marked = frozenset(range(self.n_vertices)) if marked is None else frozenset(marked)
        self._check_connected()
        self.cone_angles = self._cone_angles()  # in units of pi
        for v, k in self.cone_angles.items():
            if k < 1:
                raise MalformedSurface(f"vertex {v} has angle {k}*pi")
        unmarked = [v for v in range(self.n_vertices) if v not in self.marked]
        if unmarked:
            raise UnmarkedConePoint(f"vertex classes {unmarked} are not marked "
                                    f"(cone angles {[self.cone_angles[v] for v in unmarked]} pi)")

    # -- construction checks ------------------------------------------------
    def _validate_geometry(self):
        n = len(self.triangles)
        for t, tri in enumerate(self.triangles):
            s = P.orient(*tri)
            if s == 0:
                raise MalformedSurface(f"triangle {t} is degenerate")
            if s < 0:
                raise NonOrientable(f"triangle {t} is clockwise")
            for e in range(3):
                if (t, e) not in self.glue:
                    raise MalformedSurface(f"edge {(t, e)} is not glued")
        for (t, e), (t2, e2, s) in self.glue.items():
            u = self.edge_vector(t, e)
            w = self.edge_vector(t2, e2)
            if P.key(u) == P.key(P.signed(-s, w)):
                continue
            if P.key(u) == P.key(P.signed(s, w)):
                raise NonOrientable(f"gluing {(t, e)}~{(t2, e2)} reverses orientation")
            raise EdgeLengthMismatch(f"edge {(t, e)} = {u} does not match {(t2, e2)} = {w}")
        if n == 0:
            raise MalformedSurface("no triangles")

    def _vertex_classes(self) -> dict:
        parent = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (t, e), (t2, e2, _) in self.glue.items():
            for a, b in (((t, e), (t2, (e2 + 1) % 3)), ((t, (e + 1) % 3), (t2, e2))):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        ids = {}
        out = {}
        for t in range(len(self.triangles)):
            for k in range(3):
                r = find((t, k))
                if r not in ids:
                    ids[r] = len(ids)
                out[(t, k)] = ids[r]
        return out

    def _check_connected(self):
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for e in range(3):
                t2 = self.glue[(t, e)][0]
                if t2 not in seen:
                    seen.add(t2)
                    stack.append(t2)
        if len(seen) != len(self.triangles):
            raise DisconnectedSurface(f"only {len(seen)} of {len(self.triangles)} triangles reachable")

    def _cone_angles(self) -> dict:
        angles = {}
        for v in range(self.n_vertices):
            c0 = min(c for c, cls in self.corner_class.items() if cls == v)
            c, sg = c0, 1
            quarters = 0
            while True:
                din, dout = self.corner_rays(c, sg)
                quarters += (_quarter(dout) - _quarter(din)) % 4
                c, sg = self.next_corner_cw(c, sg)
                if c == c0:
                    break
            if quarters % 2:
                raise NonOrientable(f"vertex {v}: holonomy is not +-1")
            angles[v] = quarters // 2
        return angles

    # -- accessors ------------------------------------------------------------
    def edge_vector(self, t: int, e: int):
        tri = self.triangles[t]
        return P.sub(tri[(e + 1) % 3], tri[e])

    def vertex_class(self, t: int, k: int) -> int:
        return self.corner_class[(t, k)]

    def corner_rays(self, corner, sign=1):
        """Boundary rays (incoming-side, outgoing-side) of a corner in a chart of given sign.

        The corner spans counterclockwise from the outgoing ray to the incoming ray,
        so walking clockwise one meets the incoming ray first.
        """
        t, k = corner
        tri = self.triangles[t]
        v = tri[k]
        dout = P.signed(sign, P.sub(tri[(k + 1) % 3], v))
        din = P.signed(sign, P.sub(tri[(k + 2) % 3], v))
        return din, dout

    def next_corner_cw(self, corner, sign=1):
        """The corner met when rotating clockwise past the outgoing edge."""
        t, k = corner
        t2, e2, g = self.glue[(t, k)]
        return (t2, (e2 + 1) % 3), sign * g

    def next_corner_ccw(self, corner, sign=1):
        t, k = corner
        t2, e2, g = self.glue[(t, (k + 2) % 3)]
        return (t2, e2), sign * g

    def chart_offset(self, t: int, e: int):
        """Translation c with z_t = c + sign*z_t' for the neighbour across edge e."""
        t2, e2, g = self.glue[(t, e)]
        return P.sub(self.triangles[t][(e + 1) % 3], P.signed(g, self.triangles[t2][e2]))

    def area(self):
        total = self.field.zero()
        for tri in self.triangles:
            total = total + P.area2(tri)
        return total / 2

    def euler_characteristic(self) -> int:
        f = len(self.triangles)
        return self.n_vertices - (3 * f) // 2 + f

    def gauss_bonnet_holds(self) -> bool:
        # sum (2 pi - k pi) = 2 pi chi, divided by pi
        return sum(2 - k for k in self.cone_angles.values()) == 2 * self.euler_characteristic()

    def diameter_bound(self):
        """An upper bound for the intrinsic diameter: triangles times longest edge (L1 norm)."""
        best = self.field.zero()
        for t in range(len(self.triangles)):
            for e in range(3):
                u = self.edge_vector(t, e)
                n = abs(u[0]) + abs(u[1])
                if n > best:
                    best = n
        return best * len(self.triangles)

    def corners_of(self, v: int) -> list:
        return sorted(c for c, cls in self.corner_class.items() if cls == v)

    # -- serialisation --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "triangles": [[[x.to_json(), y.to_json()] for x, y in tri] for tri in self.triangles],
            "gluings": [{"a": list(g.a), "b": list(g.b), "sign": g.sign} for g in self.gluings],
            "marked": sorted(self.marked),
        }

    def structure_key(self) -> tuple:
        tris = tuple(tuple(P.key(p) for p in tri) for tri in self.triangles)
        glue = tuple(sorted((a, b) for a, b in self.glue.items()))
        return tris, glue, tuple(sorted(self.marked))


def _elem(field: NumberField, raw):
    if isinstance(raw, dict):
        return AlgebraicReal.from_json(field, raw)
    if isinstance(raw, list):
        return field.element(raw)
    return field.rational(raw)


def build_surface(data: dict) -> ConeSurface:
    """Build and validate a surface from its JSON description."""
    field = data["field"]
    if isinstance(field, dict):
        field = NumberField.from_json(field)
    tris = [[(_elem(field, x), _elem(field, y)) for x, y in tri] for tri in data["triangles"]]
    gl = [Gluing(tuple(g["a"]), tuple(g["b"]), int(g.get("sign", 1))) for g in data["gluings"]]
    marked = data.get("marked")
    return ConeSurface(field, tris, gl, marked)


def load_surface(data: dict):
    """Surface plus optional monodromy from a JSON description."""
    surface = build_surface(data)
    mono = None
    if "monodromy" in data and data["monodromy"] is not None:
        mono = Monodromy.from_json(surface.field, data["monodromy"])
    return surface, mono


def dump_surface(surface: ConeSurface, mono: Optional["Monodromy"] = None) -> dict:
    data = surface.to_json()
    if mono is not None:
        data["monodromy"] = mono.to_json()
    return data


def _quarter(d) -> int:
    """Clockwise quarter index of a nonzero direction: [up,right)=0, [right,down)=1, ..."""
    x, y = P.sgn(d[0]), P.sgn(d[1])
    if x >= 0 and y > 0:
        return 0
    if x > 0 and y <= 0:
        return 1
    if x <= 0 and y < 0:
        return 2
    return 3


# ---------------------------------------------------------------------------
# locations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Location:
    """A point of the surface: triangle id and coordinates in that triangle's chart."""
    tri: int
    point: tuple

    def key(self) -> tuple:
        return (self.tri, P.key(self.point))


@dataclass(frozen=True)
class VertexHit:
    vertex: int
    corner: tuple


def canonical_location(surface: ConeSurface, loc: Location):
    """Canonical representative of a point; returns (location, sign) or (VertexHit, 0).

    The sign relates charts: canonical coordinates = sign * (given coordinates) + const.
    """
    tri = surface.triangles[loc.tri]
    p = loc.point
    for k in range(3):
        if P.key(p) == P.key(tri[k]):
            return VertexHit(surface.vertex_class(loc.tri, k), (loc.tri, k)), 0
    best = (loc, 1)
    for e in range(3):
        if P.orient(tri[e], tri[(e + 1) % 3], p) == 0:
            t2, e2, g = surface.glue[(loc.tri, e)]
            c = surface.chart_offset(loc.tri, e)
            q = P.signed(g, P.sub(p, c))
            other = Location(t2, q)
            if other.key() < best[0].key():
                best = (other, g)
    return best


# ---------------------------------------------------------------------------
# development
# ---------------------------------------------------------------------------

@dataclass
class Copy:
    """A developed triangle: plane point = offset + sign * chart point."""
    tri: int
    sign: int
    offset: tuple
    verts: tuple
    wedge: Optional[tuple]  # (a, b) counterclockwise, or None if the apex sees all of it
    entry: Optional[int]

    def to_plane(self, z):
        return P.add(self.offset, P.signed(self.sign, z))

    def to_chart(self, w):
        return P.signed(self.sign, P.sub(w, self.offset))


@dataclass(frozen=True)
class Singularity:
    point: tuple
    vertex: int
    corner: tuple  # (tri, k) of the copy where it was seen


@dataclass
class DevelopedChart:
    apex: tuple
    box: tuple
    copies: list
    singularities: list
    frontier: int = 0
    origin: Optional[tuple] = None  # vertex id and quadrant for ray developments

    def locate(self, w):
        """Locate a plane point visible from the apex.  Returns (Location, sign) or VertexHit."""
        kw = P.key(w)
        for s in self.singularities:
            if P.key(s.point) == kw:
                return VertexHit(s.vertex, s.corner), 0
        for cp in self.copies:
            a, b, c = cp.verts
            if not P.in_closed_triangle(w, a, b, c):
                continue
            if cp.wedge is not None:
                d = P.sub(w, self.apex)
                if P.sgn(d[0]) != 0 or P.sgn(d[1]) != 0:
                    wa, wb = cp.wedge
                    if P.sgn(P.cross(wa, d)) < 0 or P.sgn(P.cross(d, wb)) < 0:
                        continue
            return Location(cp.tri, cp.to_chart(w)), cp.sign
        raise LookupError(f"point {w} not inside the development")

    def visible_pieces(self):
        """(copy, polygon) pairs: the part of each copy actually seen from the apex."""
        out = []
        for cp in self.copies:
            poly = list(cp.verts)
            if cp.wedge is not None:
                a, b = cp.wedge
                poly = P.clip_halfplane(poly, self.apex, a)
                poly = P.clip_halfplane(poly, self.apex, P.neg(b)) if poly else poly
            if len(poly) >= 3:
                out.append((cp, poly))
        return out


def _make_copy(surface, t, sign, offset, wedge, entry):
    verts = tuple(P.add(offset, P.signed(sign, z)) for z in surface.triangles[t])
    return Copy(t, sign, offset, verts, wedge, entry)


def _cross_edge(surface, cp: Copy, e: int, wedge) -> Copy:
    t2, e2, g = surface.glue[(cp.tri, e)]
    c = surface.chart_offset(cp.tri, e)
    offset = P.add(cp.offset, P.signed(cp.sign, c))
    return _make_copy(surface, t2, cp.sign * g, offset, wedge, e2)


class _Walker:
    def __init__(self, surface, apex, box, cap, prune=None):
        self.s = surface
        self.apex = apex
        self.box = box
        self.cap = cap
        self.prune = prune
        self.copies: list = []
        self.sings: dict = {}
        self.heap: list = []
        self.counter = 0
        self.frontier = 0

    def add_copy(self, cp):
        self.copies.append(cp)
        if len(self.copies) > self.cap:
            raise BudgetExhausted(f"development needs more than {self.cap} triangle copies")
        return cp

    def record(self, cp, k):
        w = cp.verts[k]
        if not P.in_box(w, self.box):
            return
        kw = P.key(w)
        if kw not in self.sings:
            self.sings[kw] = Singularity(w, self.s.vertex_class(cp.tri, k), (cp.tri, k))
            if self.prune is not None and hasattr(self.prune, "saw"):
                self.prune.saw(w)

    def push(self, cp, e, wedge):
        a, b = wedge
        if P.sgn(P.cross(a, b)) <= 0:
            return
        p, q = cp.verts[e], cp.verts[(e + 1) % 3]
        if not P.bbox_meets(p, q, self.box):
            self.frontier += 1
            return
        if self.prune is not None and self.prune(p, q):
            return
        # the priority only orders the search, so floats suffice
        ax, ay = P.fl(self.apex[0]), P.fl(self.apex[1])
        pri = min(max(abs(P.fl(p[0]) - ax), abs(P.fl(p[1]) - ay)),
                  max(abs(P.fl(q[0]) - ax), abs(P.fl(q[1]) - ay)))
        self.counter += 1
        heapq.heappush(self.heap, (pri, self.counter, cp, e, wedge))

    def push_exits(self, cp, wedge):
        """Push the two edges of a copy other than its entry edge."""
        a, b = wedge
        for j in ((cp.entry + 1) % 3, (cp.entry + 2) % 3):
            p, q = cp.verts[j], cp.verts[(j + 1) % 3]
            sa = P.ccw_later(a, P.sub(p, self.apex))
            sb = P.ccw_earlier(b, P.sub(q, self.apex))
            self.push(cp, j, (sa, sb))

    def run(self):
        while self.heap:
            _, _, cp, e, wedge = heapq.heappop(self.heap)
            new = self.add_copy(_cross_edge(self.s, cp, e, wedge))
            far = (new.entry + 2) % 3
            d = P.sub(new.verts[far], self.apex)
            if P.strictly_inside_wedge(d, *wedge):
                self.record(new, far)
            self.push_exits(new, wedge)

    def chart(self, origin=None) -> DevelopedChart:
        sings = sorted(self.sings.values(), key=lambda s: (P.fl(s.point[0]), P.fl(s.point[1])))
        return DevelopedChart(self.apex, self.box, self.copies, sings, self.frontier, origin)


def _box_around(c, r):
    return (c[0] - r, c[0] + r, c[1] - r, c[1] + r)


def develop_from_point(surface: ConeSurface, loc: Location, radius, sign: int = 1,
                       apex=None, cap: Optional[int] = None, prune=None, box=None) -> DevelopedChart:
    """Develop everything visible from a regular point within an L-infinity radius.

    The start triangle is placed so that plane = apex + sign*(chart - loc.point);
    by default the apex is loc.point itself (plane coordinates = chart coordinates).
    An explicit ``box`` (xmin, xmax, ymin, ymax) containing the apex replaces the radius.
    """
    if apex is None:
        apex = loc.point if sign == 1 else P.neg(loc.point)
    cap = cell_cap() if cap is None else cap
    if box is None:
        box = _box_around(apex, radius)
    offset = P.sub(apex, P.signed(sign, loc.point))
    w = _Walker(surface, apex, box, cap, prune)
    starts = [w.add_copy(_make_copy(surface, loc.tri, sign, offset, None, None))]
    tri = starts[0].verts
    on_edge = [e for e in range(3) if P.orient(tri[e], tri[(e + 1) % 3], apex) == 0]
    if any(P.key(v) == P.key(apex) for v in tri):
        raise ValueError("development apex is a vertex; use develop_sector")
    for e in on_edge:
        starts.append(w.add_copy(_cross_edge(surface, starts[0], e, None)))
    for cp in starts:
        for k in range(3):
            w.record(cp, k)
        for e in range(3):
            p, q = cp.verts[e], cp.verts[(e + 1) % 3]
            if P.orient(p, q, apex) > 0:
                w.push(cp, e, (P.sub(p, apex), P.sub(q, apex)))
    w.run()
    return w.chart()


# -- sectors at a vertex ------------------------------------------------------

@dataclass(frozen=True)
class QuadrantBase:
    """A marked vertex with a reference corner containing the upward direction."""
    vertex: int
    corner: tuple


def reference_corner(surface: ConeSurface, v: int) -> tuple:
    """Smallest corner at v whose half-open span [incoming, outgoing) clockwise contains up."""
    for c in surface.corners_of(v):
        din, dout = surface.corner_rays(c)
        if _cw_halfopen_contains(UP, din, dout):
            return c
    raise MalformedSurface(f"no corner at vertex {v} contains the upward direction")


def _cw_halfopen_contains(d, din, dout) -> bool:
    # clockwise from din (inclusive) to dout (exclusive); the span is below pi
    c1 = P.sgn(P.cross(d, din))  # din counterclockwise of d (or equal)
    c2 = P.sgn(P.cross(dout, d))  # d counterclockwise of dout
    if c1 == 0:
        return P.sgn(din[0] * d[0] + din[1] * d[1]) > 0
    return c1 > 0 and c2 > 0


@dataclass
class _Unrolled:
    corner: tuple
    sign: int
    start: tuple  # (quarter count, direction) of the incoming ray
    end: tuple


def _unroll(surface, base: QuadrantBase, lo_quarter: int, hi_quarter: int) -> list:
    """Corners around the vertex, clockwise, with unrolled angular positions, covering [lo, hi]."""
    c0 = base.corner
    din, dout = surface.corner_rays(c0)
    q = _quarter(din)
    n0 = 0 if (P.sgn(din[0]) == 0 and P.sgn(din[1]) > 0) else q - 4
    out = []
    # forward (clockwise)
    c, sg, n = c0, 1, n0
    while True:
        din_c, dout_c = surface.corner_rays(c, sg)
        n_end = n + (_quarter(dout_c) - _quarter(din_c)) % 4
        out.append(_Unrolled(c, sg, (n, din_c), (n_end, dout_c)))
        if n_end >= hi_quarter + 1:
            break
        c, sg = surface.next_corner_cw(c, sg)
        n = n_end
    # backward (counterclockwise)
    c, sg = c0, 1
    n = n0
    while n >= lo_quarter:
        c, sg = surface.next_corner_ccw(c, sg)
        din_c, dout_c = surface.corner_rays(c, sg)
        n_start = n - (_quarter(dout_c) - _quarter(din_c)) % 4
        out.insert(0, _Unrolled(c, sg, (n_start, din_c), (n, dout_c)))
        n = n_start
    return out


def _angle_lt(p1, p2) -> bool:
    """Strict order of unrolled clockwise positions (quarter count, direction)."""
    if p1[0] != p2[0]:
        return p1[0] < p2[0]
    return P.sgn(P.cross(p1[1], p2[1])) < 0


def develop_sector(surface: ConeSurface, base: QuadrantBase, lo_quarter: int, hi_quarter: int,
                   box, cap: Optional[int] = None, prune=None) -> DevelopedChart:
    """Develop what is visible from the vertex inside clockwise angular range [l_lo, l_hi].

    The apex sits at the plane origin and the reference corner is developed with sign +1.
    """
    cap = cell_cap() if cap is None else cap
    zero = surface.field.zero()
    apex = (zero, zero)
    w = _Walker(surface, apex, box, cap, prune)
    lo = (lo_quarter, AXES[lo_quarter % 4])
    hi = (hi_quarter, AXES[hi_quarter % 4])
    for u in _unroll(surface, base, lo_quarter, hi_quarter):
        if not (_angle_lt(u.start, hi) and _angle_lt(lo, u.end)):
            continue
        first = u.start if _angle_lt(lo, u.start) else lo
        last = u.end if _angle_lt(u.end, hi) else hi
        a, b = last[1], first[1]  # counterclockwise from a to b
        a = tuple(surface.field(x) for x in a)
        b = tuple(surface.field(x) for x in b)
        t, k = u.corner
        offset = P.neg(P.signed(u.sign, surface.triangles[t][k]))
        cp = w.add_copy(_make_copy(surface, t, u.sign, offset, (a, b), k))
        for j in ((k + 1) % 3, (k + 2) % 3):
            if P.in_closed_wedge(cp.verts[j], a, b):
                w.record(cp, j)
        p, q = cp.verts[(k + 1) % 3], cp.verts[(k + 2) % 3]
        w.push(cp, (k + 1) % 3, (P.ccw_later(a, p), P.ccw_earlier(b, q)))
    w.run()
    return w.chart(origin=(base.vertex, lo_quarter, hi_quarter))


def to_quadrant_coords(i: int, w):
    """Plane point -> coordinates in quadrant i (x along ray i + 1, y along ray i)."""
    q = i % 4
    px, py = w
    if q == 0:
        return (px, py)
    if q == 1:
        return (-py, px)
    if q == 2:
        return (-px, -py)
    return (py, -px)


def from_quadrant_coords(i: int, z):
    q = i % 4
    x, y = z
    if q == 0:
        return (x, y)
    if q == 1:
        return (y, -x)
    if q == 2:
        return (-x, -y)
    return (-y, x)


def quadrant_box(i: int, budget):
    zero = budget - budget
    corners = [from_quadrant_coords(i, (zero, zero)), from_quadrant_coords(i, (budget, budget))]
    xs = sorted(c[0] for c in corners)
    ys = sorted(c[1] for c in corners)
    return (xs[0], xs[1], ys[0], ys[1])


def develop_ray(surface: ConeSurface, base: QuadrantBase, quadrant: int, budget,
                cap: Optional[int] = None, prune=None) -> DevelopedChart:
    """Development of quadrant ``quadrant`` at the base vertex, truncated to [0, budget]^2."""
    if not budget > 0:
        raise ValueError("budget must be positive")
    budget = surface.field(budget)
    return develop_sector(surface, base, quadrant, quadrant + 1, quadrant_box(quadrant, budget),
                          cap=cap, prune=prune)


class DominancePrune:
    """Skip edges lying beyond a singularity already found, in one quadrant.

    If both ends of an edge are up and to the right of the same singularity (in
    quadrant coordinates), so is everything behind the edge as seen from the
    apex, and no point there can span an empty rectangle with the apex.  Tests
    are in floating point with a relative margin, erring towards not pruning.
    """

    MARGIN = 1e-9

    def __init__(self, quadrant: int, origin=None):
        self.quadrant = quadrant
        self.origin = (0.0, 0.0) if origin is None else (P.fl(origin[0]), P.fl(origin[1]))
        self.front: list = []

    def _coords(self, w):
        return to_quadrant_coords(self.quadrant, (P.fl(w[0]) - self.origin[0], P.fl(w[1]) - self.origin[1]))

    def saw(self, w):
        x, y = self._coords(w)
        if x > 0 and y > 0:
            if any(a <= x and b <= y for a, b in self.front):
                return
            self.front = [(a, b) for a, b in self.front if not (x <= a and y <= b)] + [(x, y)]

    def _beyond(self, z, a, b) -> bool:
        m = self.MARGIN * (1 + abs(a) + abs(b))
        return z[0] > a + m and z[1] > b + m

    def __call__(self, p, q) -> bool:
        zp, zq = self._coords(p), self._coords(q)
        return any(self._beyond(zp, a, b) and self._beyond(zq, a, b) for a, b in self.front)


def quadrant_singularities(chart: DevelopedChart, quadrant: int) -> list:
    """Singularities of a quadrant development in quadrant coordinates, sorted by x."""
    pts = [to_quadrant_coords(quadrant, s.point) for s in chart.singularities]
    pts.sort(key=lambda z: P.fl(z[0]))
    return pts


# -- transport and locating -----------------------------------------------------

def _walk_segment(surface: ConeSurface, loc: Location, vector, cap: int):
    """Follow a segment triangle by triangle; None if it meets a vertex before its end."""
    start = loc.point
    target = P.add(start, vector)
    cp = _make_copy(surface, loc.tri, 1, (surface.field(0), surface.field(0)), None, None)
    for _ in range(cap):
        a, b, c = cp.verts
        if P.in_closed_triangle(target, a, b, c):
            canon, flip = canonical_location(surface, Location(cp.tri, cp.to_chart(target)))
            return canon if isinstance(canon, VertexHit) else (canon, cp.sign * flip)
        side = [P.sgn(P.cross(vector, P.sub(v, start))) for v in cp.verts]
        if 0 in side:
            return None
        exit_edge = next(e for e in range(3) if side[e] < 0 < side[(e + 1) % 3])
        cp = _cross_edge(surface, cp, exit_edge, None)
    raise BudgetExhausted(f"segment crosses more than {cap} triangles")


def transport(surface: ConeSurface, loc: Location, vector, cap: Optional[int] = None):
    """End point of the straight segment from a regular point along a chart vector.

    Returns ``(Location, sign)`` where sign relates the start chart to the end chart,
    or a :class:`VertexHit` if the segment ends at a singularity.
    """
    r = P.linf(vector)
    if r == 0:
        canon, flip = canonical_location(surface, loc)
        return canon if isinstance(canon, VertexHit) else (canon, flip)
    cap = cell_cap() if cap is None else cap
    walked = _walk_segment(surface, loc, vector, cap)
    if walked is not None:
        return walked
    # the segment runs through a cone point on the way: let the development decide
    chart = develop_from_point(surface, loc, r, cap=cap)
    target = P.add(loc.point, vector)
    hit = chart.locate(target)
    if isinstance(hit, tuple) and isinstance(hit[0], VertexHit):
        return hit[0]
    where, sgn = hit
    canon, flip = canonical_location(surface, where)
    if isinstance(canon, VertexHit):
        return canon
    return canon, sgn * flip


# ---------------------------------------------------------------------------
# axis saddle connections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Clean:
    budget: object


@dataclass(frozen=True)
class AxisSegment:
    start_vertex: int
    direction: tuple
    length: object
    end_vertex: int


@dataclass(frozen=True)
class Found:
    segment: AxisSegment


def check_no_axis_saddle(surface: ConeSurface, budget=None):
    """Search for a horizontal or vertical segment joining two singularities."""
    if budget is None:
        budget = 4 * surface.diameter_bound()
    budget = surface.field(budget)
    if not budget > 0:
        return Clean(budget)
    # the answer depends only on the surface, which is never mutated
    cache = surface.__dict__.setdefault("_saddle_cache", {})
    key = P.key((budget, budget))
    if key not in cache:
        cache[key] = _find_axis_saddle(surface, budget)
    return cache[key]


def _find_axis_saddle(surface: ConeSurface, budget):
    best = None
    for v in range(surface.n_vertices):
        for c in surface.corners_of(v):
            t, k = c
            tri = surface.triangles[t]
            dout = P.sub(tri[(k + 1) % 3], tri[k])
            din = P.sub(tri[(k + 2) % 3], tri[k])
            for d in AXES:
                dd = (surface.field(d[0]), surface.field(d[1]))
                # half-open: include the outgoing edge, exclude the incoming one
                on_out = P.sgn(P.cross(dout, dd)) == 0 and \
                    P.sgn(dout[0] * dd[0] + dout[1] * dd[1]) > 0
                if on_out:
                    length = abs(dout[0]) + abs(dout[1])
                    if length <= budget:
                        seg = AxisSegment(v, d, length, surface.vertex_class(t, (k + 1) % 3))
                        best = _shorter(best, seg)
                    continue
                if not P.strictly_inside_wedge(dd, dout, din):
                    continue
                seg = _trace_axis_ray(surface, c, dd, d, budget)
                if seg is not None:
                    best = _shorter(best, seg)
    return Clean(budget) if best is None else Found(best)


def _shorter(a, b):
    if a is None or b.length < a.length:
        return b
    if b.length == a.length and b.direction[0] == 0 and a.direction[0] != 0:
        return b  # prefer vertical on ties
    return a


def _trace_axis_ray(surface, corner, dd, d, budget):
    t, k = corner
    v = surface.vertex_class(t, k)
    origin = surface.triangles[t][k]
    cp = _make_copy(surface, t, 1, P.neg(origin), None, None)
    exit_edge = (k + 1) % 3
    while True:
        p, q = cp.verts[exit_edge], cp.verts[(exit_edge + 1) % 3]
        # distance along d to the crossing of edge pq
        s = P.cross(p, q) / P.cross(dd, P.sub(q, p))
        if s > budget:
            return None
        cp = _cross_edge(surface, cp, exit_edge, None)
        far = (cp.entry + 2) % 3
        wv = cp.verts[far]
        side = P.sgn(P.cross(dd, wv))
        if side == 0:
            length = abs(wv[0]) + abs(wv[1])
            if length <= budget:
                return AxisSegment(v, d, length, surface.vertex_class(cp.tri, far))
            return None
        # ray leaves through the edge whose endpoints straddle it
        a0 = cp.verts[cp.entry]
        if P.sgn(P.cross(dd, a0)) * side < 0:
            exit_edge = (cp.entry + 2) % 3  # edge far -> entry start
        else:
            exit_edge = (cp.entry + 1) % 3  # edge entry end -> far


# ---------------------------------------------------------------------------
# monodromy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImageEntry:
    tri: int
    point: tuple
    sign: int


class Monodromy:
    """The affine map: diag(lambda, 1/lambda) followed by a chart correspondence.

    ``images[j]`` is where the centroid of triangle j goes and the sign of the
    linear part there.
    """

    def __init__(self, dilatation: AlgebraicReal, images):
        self.dilatation = dilatation
        self.images = tuple(images)

    def linear(self, j: int, vec):
        lam = self.dilatation
        s = self.images[j].sign
        return P.signed(s, (vec[0] * lam, vec[1] / lam))

    def apply(self, surface: ConeSurface, loc: Location, cap: Optional[int] = None):
        """Image of a regular point: (Location, sign) or VertexHit."""
        j = loc.tri
        c = P.centroid(surface.triangles[j])
        img = self.images[j]
        start = Location(img.tri, tuple(surface.field(x) for x in img.point))
        v = self.linear(j, P.sub(loc.point, c))
        res = transport(surface, start, v, cap=cap)
        if isinstance(res, VertexHit):
            return res
        where, sg = res
        return where, sg * img.sign

    def to_json(self) -> dict:
        return {"dilatation": self.dilatation.to_json(),
                "map": [{"tri": e.tri, "point": [e.point[0].to_json(), e.point[1].to_json()],
                         "sign": e.sign} for e in self.images]}

    @classmethod
    def from_json(cls, field: NumberField, data: dict) -> "Monodromy":
        lam = _elem(field, data["dilatation"])
        imgs = [ImageEntry(int(e["tri"]), (_elem(field, e["point"][0]), _elem(field, e["point"][1])),
                           int(e.get("sign", 1))) for e in data["map"]]
        return cls(lam, imgs)


@dataclass(frozen=True)
class MonodromyOk:
    pass


@dataclass(frozen=True)
class InvalidDilatation:
    value: object


@dataclass(frozen=True)
class MonodromyMismatch:
    triangle: int
    reason: str


def validate_monodromy(surface: ConeSurface, phi: Monodromy):
    """Check that the correspondence is an isometry after rescaling, respecting gluings."""
    if not phi.dilatation > 1:
        return InvalidDilatation(phi.dilatation)
    if len(phi.images) != len(surface.triangles):
        return MonodromyMismatch(0, "image list has the wrong length")
    for j, tri in enumerate(surface.triangles):
        img = phi.images[j]
        if img.sign not in (1, -1) or not (0 <= img.tri < len(surface.triangles)):
            return MonodromyMismatch(j, "malformed image entry")
        start = Location(img.tri, tuple(surface.field(x) for x in img.point))
        canon, _ = canonical_location(surface, start)
        if isinstance(canon, VertexHit):
            return MonodromyMismatch(j, "centroid maps to a singularity")
        for k in range(3):
            try:
                res = phi.apply(surface, Location(j, tri[k]))
            except LookupError:
                return MonodromyMismatch(j, f"vertex {k} image not reachable")
            if not isinstance(res, VertexHit):
                return MonodromyMismatch(j, f"vertex {k} does not map to a singularity")
            if res.vertex not in surface.marked:
                return MonodromyMismatch(j, f"vertex {k} maps to an unmarked point")
        for e in range(3):
            t2, e2, g = surface.glue[(j, e)]
            m1 = P.midpoint(tri[e], tri[(e + 1) % 3])
            tri2 = surface.triangles[t2]
            m2 = P.midpoint(tri2[e2], tri2[(e2 + 1) % 3])
            r1 = phi.apply(surface, Location(j, m1))
            r2 = phi.apply(surface, Location(t2, m2))
            if isinstance(r1, VertexHit) or isinstance(r2, VertexHit):
                return MonodromyMismatch(j, f"edge {e} midpoint maps to a singularity")
            if r1[0].key() != r2[0].key():
                return MonodromyMismatch(j, f"edge {e} images disagree")
            s1 = r1[1]
            s2 = r2[1]
            if s1 != s2 * g:
                return MonodromyMismatch(j, f"edge {e} orientation disagrees")
    return MonodromyOk()


# ---------------------------------------------------------------------------
# punctured torus bundles
# ---------------------------------------------------------------------------

def _reduce_basis(e1, e2):
    """Lagrange-Gauss reduction of a plane lattice basis (float guided, exact integers)."""
    a = [1, 0]
    b = [0, 1]
    f1 = (float(e1[0]), float(e1[1]))
    f2 = (float(e2[0]), float(e2[1]))

    def comb(c):
        return (c[0] * f1[0] + c[1] * f2[0], c[0] * f1[1] + c[1] * f2[1])

    def n2(v):
        return v[0] * v[0] + v[1] * v[1]

    for _ in range(200):
        u, v = comb(a), comb(b)
        if n2(u) > n2(v):
            a, b = b, a
            u, v = v, u
        mu = round((u[0] * v[0] + u[1] * v[1]) / n2(u))
        if mu == 0:
            break
        b = [b[0] - mu * a[0], b[1] - mu * a[1]]
    return a, b


def _hnf_columns(a, b):
    """Basis (h1, t), (0, h2) of the integer lattice spanned by columns a and b."""
    g, x, y = _ext_gcd(a[0], b[0])
    if g == 0 or b[0] * a[1] - a[0] * b[1] == 0:
        raise ValueError("sublattice is degenerate")
    return (g, x * a[1] + y * b[1]), abs((b[0] * a[1] - a[0] * b[1]) // g)


def _ext_gcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _reduce_mod(z, c1, h2):
    n = z[0] // c1[0]
    x, y = z[0] - n * c1[0], z[1] - n * c1[1]
    return (x, y % h2)


def ptorus_from_matrix(m, sublattice=None):
    """Once-punctured torus bundle monodromy in eigencoordinates.

    Returns ``(surface, monodromy)``.  The plane coordinates are chosen so that the
    matrix acts as +-diag(lam, 1/lam): x is the expanding direction.

    ``sublattice`` (two integer column vectors spanning a sublattice invariant
    under ``m``) gives the finite cover of the torus by that sublattice instead,
    with one singularity per coset.
    """
    (a, b), (c, d) = m
    if a * d - b * c != 1:
        raise NotUnimodular(f"det = {a * d - b * c}")
    tr = a + d
    if abs(tr) <= 2:
        raise NotHyperbolic(f"|trace| = {abs(tr)}")
    sgn_tr = 1 if tr > 0 else -1
    at = abs(tr)
    # larger root of x^2 - |tr| x + 1 lies in (|tr| - 1, |tr|)
    field = NumberField([1, -at, 1], (at - 1, at))
    lam = field.gen
    inv = at - lam  # the other root
    # eigenvalues of m are sgn_tr*lam and sgn_tr*inv; left eigenvectors (c, mu - a)
    mu1 = lam * sgn_tr
    mu2 = inv * sgn_tr
    row1 = (field(c), mu1 - a)
    row2 = (field(c), mu2 - a)
    det = row1[0] * row2[1] - row1[1] * row2[0]
    if det < 0:
        row2 = (-row2[0], -row2[1])

    def eig(z):
        return (row1[0] * z[0] + row1[1] * z[1], row2[0] * z[0] + row2[1] * z[1])

    E1, E2 = eig((1, 0)), eig((0, 1))
    ca, cb = _reduce_basis(E1, E2)
    u = P.add(P.scale(field(ca[0]), E1), P.scale(field(ca[1]), E2))
    v = P.add(P.scale(field(cb[0]), E1), P.scale(field(cb[1]), E2))
    if P.sgn(P.cross(u, v)) < 0:
        v = P.neg(v)
        cb = [-cb[0], -cb[1]]
    # sublattice in (u, v) coordinates
    if sublattice is None:
        c1, h2 = (1, 0), 1
    else:
        s1, s2 = sublattice
        for col in (s1, s2):
            img = (a * col[0] + b * col[1], c * col[0] + d * col[1])
            dt = s1[0] * s2[1] - s1[1] * s2[0]
            p_ = img[0] * s2[1] - img[1] * s2[0]
            q_ = s1[0] * img[1] - s1[1] * img[0]
            if dt == 0 or p_ % dt or q_ % dt:
                raise ValueError("sublattice is not invariant under the matrix")
        cdet = ca[0] * cb[1] - ca[1] * cb[0]   # +-1: (u, v) is a lattice basis

        def to_uv(z):
            return ((z[0] * cb[1] - z[1] * cb[0]) * cdet, (ca[0] * z[1] - ca[1] * z[0]) * cdet)

        c1, h2 = _hnf_columns(to_uv(s1), to_uv(s2))
    reps = [(i, j) for i in range(c1[0]) for j in range(h2)]
    index = {r: n for n, r in enumerate(reps)}

    def rep_of(i, j):
        return index[_reduce_mod((i, j), c1, h2)]

    def at_uv(i, j):
        return P.add(P.scale(field(i), u), P.scale(field(j), v))

    tris = []
    for i, j in reps:
        o = at_uv(i, j)
        tris.append((o, P.add(o, u), P.add(o, P.add(u, v))))
        tris.append((o, P.add(o, P.add(u, v)), P.add(o, v)))
    gl = []
    for n, (i, j) in enumerate(reps):
        gl.append(Gluing((2 * n, 2), (2 * n + 1, 0), 1))
        gl.append(Gluing((2 * n, 0), (2 * rep_of(i, j - 1) + 1, 1), 1))
        gl.append(Gluing((2 * n, 1), (2 * rep_of(i + 1, j) + 1, 2), 1))
    surface = ConeSurface(field, tris, gl, marked=[0] if sublattice is None else None)
    images = []
    det_uv = P.cross(u, v)
    for tri in tris:
        cen = P.centroid(tri)
        img = (cen[0] * lam, cen[1] / lam)
        if sgn_tr < 0:
            img = P.neg(img)
        # lattice coordinates of img in basis (u, v)
        s = P.cross(img, v) / det_uv
        t = P.cross(u, img) / det_uv
        fs = s - s.floor()
        ft = t - t.floor()
        r = rep_of(s.floor(), t.floor())
        pt = P.add(at_uv(*reps[r]), P.add(P.scale(fs, u), P.scale(ft, v)))
        which = 2 * r + (0 if fs >= ft else 1)
        images.append(ImageEntry(which, pt, sgn_tr))
    return surface, Monodromy(lam, images)
