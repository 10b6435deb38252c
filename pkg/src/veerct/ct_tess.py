"""Combinatorics of the Cannon-Thurston tessellation, computed from flat geometry.

Around a puncture (the apex) the directions split into quadrants; quadrant ``i``
lies between the rays i and i + 1 (ray i vertical for even i).  In quadrant
coordinates (x along ray i + 1, y along ray i) the ruling singularities of quadrant i
are the singularities p whose rectangle [0, x] x [0, y] is otherwise empty.  They
form a staircase indexed by s: x grows and y shrinks with s, and s = 0 is the first one
with x >= y.

Everything else is read off the rays.  Along ray j the staircase of quadrant j
sits at its y coordinates and the staircase of quadrant j-1 at its x
coordinates.  Consecutive points of this merged sequence are joined by an edge:
in-furrow when both come from the same quadrant, cross-furrow otherwise.  The
cell of furrow i at position s has gates (i, s) and (i, s + 1); its spikes are the
points of the neighbouring quadrants that fall between the gates along ray i and
along ray i + 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Optional

from . import planar as P
from .flat_surface import (
    BudgetExhausted, ConeSurface, DominancePrune, Location, QuadrantBase, VertexHit, develop_from_point, develop_ray,
    from_quadrant_coords, quadrant_singularities, reference_corner, to_quadrant_coords,
)
from .veering import BLUE, RED

IN_FURROW = "InFurrow"
CROSS_FURROW = "CrossFurrow"
MAX_DOUBLINGS = 12


class WindowTooSmall(RuntimeError):
    """The staircases computed so far do not decide a cell."""


class AxisTie(ValueError):
    """Two singularities share a coordinate along a ray: an axis-parallel saddle connection."""


# ---------------------------------------------------------------------------
# quadrants and ruling singularities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Quadrant:
    index: int
    vertex: int = 0

    @property
    def parity(self) -> int:
        return self.index % 2

    def ray_is_vertical(self, j: int) -> bool:
        """Whether the bounding ray j (j = index or index + 1) is vertical."""
        return j % 2 == 0

    @property
    def vertex_color(self) -> str:
        # segments from the apex into an even quadrant rise
        return RED if self.index % 2 == 0 else BLUE

    @property
    def furrow_color(self) -> str:
        return furrow_color(self.index)


def furrow_color(i: int) -> str:
    return BLUE if i % 2 == 0 else RED


@dataclass(frozen=True)
class RulingSingularity:
    quadrant: int
    s: int
    x: object
    y: object

    @property
    def id(self) -> tuple:
        return (self.quadrant, self.s)

    @property
    def certificate(self) -> tuple:
        """The empty open rectangle (0, x) x (0, y) in quadrant coordinates."""
        return (self.x, self.y)

    def coordinate_on(self, j: int):
        """Distance from the apex of its projection to ray j (j = quadrant or quadrant + 1)."""
        if j == self.quadrant:
            return self.y
        if j == self.quadrant + 1:
            return self.x
        raise ValueError(f"ray {j} does not bound quadrant {self.quadrant}")

    def to_json(self) -> dict:
        return {"id": list(self.id), "x": self.x.to_json(), "y": self.y.to_json()}


def _pareto(points) -> list:
    """Points with no other point strictly below-left, sorted by x."""
    pts = sorted(points, key=lambda z: P.fl(z[0]))
    if any(not a[0] < b[0] for a, b in zip(pts, pts[1:])):
        # floats could not separate them; sort exactly
        pts.sort(key=cmp_to_key(lambda a, b: (a[0] > b[0]) - (a[0] < b[0])))
        for a, b in zip(pts, pts[1:]):
            if a[0] == b[0]:
                raise AxisTie(f"two singularities at x = {P.fl(a[0])}")
    out = []
    best = None
    for z in pts:
        if best is not None and z[1] == best:
            raise AxisTie(f"two singularities at y = {P.fl(z[1])}")
        if best is None or z[1] < best:
            out.append(z)
            best = z[1]
    return out


class StaircaseSource:
    """Staircase of one quadrant, developed with a growing budget."""

    def __init__(self, surface: ConeSurface, quadrant: int, vertex: int = 0, budget=None,
                 cap: Optional[int] = None, grow: bool = True):
        self.surface = surface
        self.quadrant = quadrant
        self.base = QuadrantBase(vertex, reference_corner(surface, vertex))
        self.cap = cap
        self.grow = grow
        self.budget = surface.field(budget if budget is not None else 2)
        self.points: dict = {}
        self._compute()

    def _compute(self):
        chart = develop_ray(self.surface, self.base, self.quadrant, self.budget, cap=self.cap,
                            prune=DominancePrune(self.quadrant))
        stairs = _pareto(quadrant_singularities(chart, self.quadrant))
        # the first point with x >= y in the box is the first one overall
        zero = [n for n, (x, y) in enumerate(stairs) if x >= y]
        if not zero:
            self.points = {}
            return
        n0 = zero[0]
        self.points = {n - n0: z for n, z in enumerate(stairs)}

    def _double(self, why: str):
        if not self.grow:
            raise WindowTooSmall(f"quadrant {self.quadrant}: {why} (budget {P.fl(self.budget)})")
        self.budget = self.budget * 2
        self._compute()

    def _loop(self, done, why):
        for _ in range(MAX_DOUBLINGS + 1):
            if done():
                return
            self._double(why)
        raise BudgetExhausted(f"quadrant {self.quadrant}: {why} after {MAX_DOUBLINGS} doublings")

    def ensure_s(self, lo: int, hi: int):
        """Positions lo..hi inclusive."""
        self._loop(lambda: all(s in self.points for s in range(lo, hi + 1)),
                   f"positions {lo}..{hi} not reached")

    def ensure_x(self, a, b):
        """All staircase points with x in [a, b]."""
        def done():
            return bool(self.points) and self.budget >= b and any(z[0] < a for z in self.points.values())
        self._loop(done, "x range not covered")

    def ensure_y(self, a, b):
        def done():
            return bool(self.points) and self.budget >= b and any(z[1] < a for z in self.points.values())
        self._loop(done, "y range not covered")

    def singularity(self, s: int) -> RulingSingularity:
        x, y = self.points[s]
        return RulingSingularity(self.quadrant, s, x, y)

    def all(self) -> list:
        return [self.singularity(s) for s in sorted(self.points)]


def _window(depth) -> tuple:
    if isinstance(depth, tuple):
        return depth
    return -(depth // 2), depth - depth // 2


def staircase(surface: ConeSurface, quadrant, depth, vertex: int = 0, budget=None,
              cap: Optional[int] = None) -> list:
    """Ruling singularities of a quadrant at positions of the depth window.

    ``depth`` is a count n (positions -(n // 2) .. n - n // 2 - 1) or a half-open
    range (lo, hi).
    """
    i = quadrant.index if isinstance(quadrant, Quadrant) else int(quadrant)
    lo, hi = _window(depth)
    if hi <= lo:
        return []
    src = StaircaseSource(surface, i, vertex, budget, cap)
    src.ensure_s(lo, hi - 1)
    out = [src.singularity(s) for s in range(lo, hi)]
    for a, b in zip(out, out[1:]):
        if not (a.x < b.x and a.y > b.y):
            raise AssertionError(f"staircase of quadrant {i} is not monotone at {a.id}")
    return out


# ---------------------------------------------------------------------------
# the window
# ---------------------------------------------------------------------------

@dataclass
class CTCell:
    id: tuple               # (i, s)
    gates: tuple            # ((i, s), (i, s + 1))
    left: tuple             # spikes along ray i, from gate s + 1 towards gate s
    right: tuple            # spikes along ray i + 1, from gate s towards gate s + 1
    color: str
    complete: bool = True

    def boundary(self) -> tuple:
        """The two boundary paths between the gates: along ray i and along ray i + 1."""
        a, b = self.gates
        return (b,) + self.left + (a,), (a,) + self.right + (b,)

    def edges(self) -> list:
        out = []
        for path in self.boundary():
            for u, v in zip(path, path[1:]):
                kind = IN_FURROW if u[0] == v[0] else CROSS_FURROW
                out.append((u, v, kind))
        return out

    def spike_count(self) -> tuple:
        return len(self.left), len(self.right)


@dataclass
class CTWindow:
    quadrants: tuple        # inclusive range of furrows
    positions: tuple        # half-open range of cell positions
    vertices: dict          # id -> RulingSingularity
    cells: dict             # (i, s) -> CTCell
    rays: dict              # j -> ids along ray j in increasing distance from the apex
    vertex: int = 0         # surface vertex at the apex

    def edges(self) -> list:
        out = []
        for j, ids in sorted(self.rays.items()):
            for u, v in zip(ids, ids[1:]):
                kind = IN_FURROW if u[0] == v[0] else CROSS_FURROW
                out.append((j, u, v, kind))
        return out

    def coordinate(self, vid: tuple, j: int):
        return self.vertices[vid].coordinate_on(j)

    def furrow_color(self, i: int) -> str:
        return furrow_color(i)

    def shifted(self, shifts: dict) -> "CTWindow":
        """The same window with s renumbered by a per-quadrant shift."""
        def mv(vid):
            return (vid[0], vid[1] + shifts.get(vid[0], 0))
        verts = {mv(k): RulingSingularity(v.quadrant, mv(k)[1], v.x, v.y) for k, v in self.vertices.items()}
        cells = {mv(k): CTCell(mv(k), tuple(mv(g) for g in c.gates), tuple(mv(x) for x in c.left),
                               tuple(mv(x) for x in c.right), c.color, c.complete)
                 for k, c in self.cells.items()}
        rays = {j: [mv(x) for x in ids] for j, ids in self.rays.items()}
        return CTWindow(self.quadrants, self.positions, verts, cells, rays, self.vertex)

    def to_json(self) -> dict:
        return {"quadrants": list(self.quadrants), "positions": list(self.positions),
                "vertices": [v.to_json() for _, v in sorted(self.vertices.items())],
                "cells": [{"id": list(c.id), "gates": [list(g) for g in c.gates],
                           "left": [list(x) for x in c.left], "right": [list(x) for x in c.right],
                           "color": c.color, "complete": c.complete,
                           "edges": [[list(u), list(v), k] for u, v, k in c.edges()]}
                          for _, c in sorted(self.cells.items())],
                "rays": {str(j): [list(x) for x in ids] for j, ids in sorted(self.rays.items())}}


def _between(src: StaircaseSource, coord: str, lo, hi) -> list:
    """Staircase points with the given coordinate in the open interval (lo, hi); ties raise."""
    k = 0 if coord == "x" else 1
    out = []
    for s, z in sorted(src.points.items()):
        c = z[k]
        if c == lo or c == hi:
            raise AxisTie(f"quadrant {src.quadrant} point {s} shares a coordinate with a gate")
        if lo < c < hi:
            out.append(s)
    return out


def ct_window(surface: ConeSurface, quadrants=(0, 2), depth=6, vertex: int = 0, budget=None,
              cap: Optional[int] = None, grow: bool = True) -> CTWindow:
    """Cells of furrows a..b at positions of the depth window, with gates and spikes.

    Staircases of the two flanking quadrants are computed as far as the spikes
    need.  With ``grow`` false the budget is fixed and missing data raises
    WindowTooSmall instead.
    """
    a, b = quadrants
    lo, hi = _window(depth)
    if b < a or hi <= lo:
        return CTWindow((a, b), (lo, hi), {}, {}, {}, vertex)
    srcs = {i: StaircaseSource(surface, i, vertex, budget, cap, grow) for i in range(a - 1, b + 2)}
    for i in range(a, b + 1):
        srcs[i].ensure_s(lo, hi)
    for i in range(a, b + 1):
        g = srcs[i].points
        srcs[i - 1].ensure_x(g[hi][1], g[lo][1])
        srcs[i + 1].ensure_y(g[lo][0], g[hi][0])

    verts = {}

    def add(i, s):
        verts[(i, s)] = srcs[i].singularity(s)
        return (i, s)

    cells = {}
    for i in range(a, b + 1):
        g = srcs[i].points
        for s in range(lo, hi):
            top, bot = add(i, s), add(i, s + 1)
            (xs, ys), (xt, yt) = g[s], g[s + 1]
            left = [add(i - 1, t) for t in _between(srcs[i - 1], "x", yt, ys)]
            right = [add(i + 1, t) for t in _between(srcs[i + 1], "y", xs, xt)]
            # order by distance from the apex along each ray
            left.sort(key=lambda vid: vid[1])          # x grows with s
            right.sort(key=lambda vid: -vid[1])        # y shrinks with s
            cells[(i, s)] = CTCell((i, s), (top, bot), tuple(left), tuple(right), furrow_color(i))

    rays = {}
    for j in range(a, b + 2):
        spans = []
        if a <= j <= b:
            g = srcs[j].points
            spans.append((g[hi][1], g[lo][1]))
        if a <= j - 1 <= b:
            g = srcs[j - 1].points
            spans.append((g[lo][0], g[hi][0]))
        lo_c = min(sp[0] for sp in spans)
        hi_c = max(sp[1] for sp in spans)
        pts = []
        for s, z in srcs[j].points.items():
            if lo_c <= z[1] <= hi_c:
                pts.append((z[1], (j, s)))
        for s, z in srcs[j - 1].points.items():
            if lo_c <= z[0] <= hi_c:
                pts.append((z[0], (j - 1, s)))
        pts.sort(key=lambda e: P.fl(e[0]))
        for (c1, _), (c2, _) in zip(pts, pts[1:]):
            if not c1 < c2:
                raise AxisTie(f"two singularities at the same distance along ray {j}")
        for _, vid in pts:
            if vid not in verts:
                add(*vid)
        rays[j] = [vid for _, vid in pts]
    return CTWindow((a, b), (lo, hi), verts, cells, rays, vertex)


# ---------------------------------------------------------------------------
# filling order and hooks
# ---------------------------------------------------------------------------

def filling_order(w) -> list:
    """Cells in the order they are filled: furrow by furrow, back and forth.

    Even furrows are filled with s ascending and odd ones with s descending.
    Accepts a CTWindow or any iterable of (i, s) pairs.
    """
    keys = list(w.cells) if isinstance(w, CTWindow) else list(w)
    return sorted(keys, key=lambda k: (k[0], k[1] if k[0] % 2 == 0 else -k[1]))


LEFT, RIGHT = "Left", "Right"


@dataclass(frozen=True)
class Hook:
    """Path along l_leaf for length t, then along the perpendicular leaf to one side."""
    leaf: int
    t: object
    side: str

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("hook length must be positive and finite")
        if self.side not in (LEFT, RIGHT):
            raise ValueError(f"side must be {LEFT} or {RIGHT}")

    def key(self) -> tuple:
        # both sides of a hook land on the same tessellation point
        return (self.leaf, P.key((self.t, self.t))[0])

    def quadrant(self) -> int:
        """Quadrant swept by the perpendicular leaf (right turns head clockwise)."""
        return self.leaf if self.side == RIGHT else self.leaf - 1


def vertex_hooks(p: RulingSingularity) -> tuple:
    """The two hooks through a ruling singularity, one from each bounding ray."""
    return Hook(p.quadrant, p.y, RIGHT), Hook(p.quadrant + 1, p.x, LEFT)


# ---------------------------------------------------------------------------
# depth-one subdivision of a cell
# ---------------------------------------------------------------------------

@dataclass
class SubDisk:
    index: int
    corners: tuple          # the two pinch points bounding it (gates or rectangle singularities)


@dataclass
class Subdivision:
    cell: tuple
    k: int
    chain: tuple            # gate, inner singularities, gate, in quadrant coordinates
    disks: list
    order: list             # visiting order of the sub-disks
    adjacency: list         # pairs of sub-disks sharing a pinch point

    def to_json(self) -> dict:
        def pt(z):
            return [P.fl(z[0]), P.fl(z[1])]
        return {"cell": list(self.cell), "k": self.k, "chain": [pt(z) for z in self.chain],
                "order": self.order, "adjacency": [list(p) for p in self.adjacency]}


def rectangle_chain(ps, pt, points) -> tuple:
    """Singularities spanning maximal empty rectangles beyond one step ``ps``, ``pt`` of a staircase.

    ``points`` are singularities in quadrant coordinates.  The rectangles have
    their lower-left corner at C = (x of ps, y of pt), ps on the left side
    and pt on the bottom side; consecutive results sit on the top and right sides.
    Returns them and whether the given points decide them: the staircase seen
    from C must start left of pt and end below ps.
    """
    cx, cy = ps[0], pt[1]
    beyond = [z for z in points if z[0] > cx and z[1] > cy]
    stairs = _pareto(beyond)
    valid = [t for t in range(len(stairs) - 1)
             if stairs[t][1] > ps[1] and stairs[t + 1][0] > pt[0]]
    if not valid:
        raise WindowTooSmall("no maximal rectangle beyond the step is visible")
    t0, t1 = valid[0], valid[-1] + 1
    if valid != list(range(t0, t1)):
        raise AssertionError("valid rectangles are not consecutive")
    decided = stairs[0][0] <= pt[0] and stairs[-1][1] <= ps[1]
    return stairs[t0:t1 + 1], decided


def partition(cell: tuple, ps, pt, qs) -> Subdivision:
    chain = (ps,) + tuple(qs) + (pt,)
    k = len(qs)
    disks = [SubDisk(n, (chain[n], chain[n + 1])) for n in range(k + 1)]
    order = list(range(k + 1))
    if cell[0] % 2:
        order.reverse()
    adjacency = [(n, n + 1) for n in range(k)]
    return Subdivision(cell, k, chain, disks, order, adjacency)


@dataclass
class PlanarMock:
    """A hand-made set of singularities in one quadrant's coordinates.

    ``gates`` optionally maps cells to their pair of gate coordinates.
    """
    points: list
    gates: dict = field(default_factory=dict)

    def subdivide(self, cell: tuple, ps=None, pt=None) -> Subdivision:
        if ps is None:
            ps, pt = self.gates[cell]
        qs, _ = rectangle_chain(ps, pt, self.points)
        return partition(cell, ps, pt, qs)


def subdivide_cell(w, cell: tuple, surface: Optional[ConeSurface] = None,
                   cap: Optional[int] = None) -> Subdivision:
    """First-level partition of a cell into sub-disks.

    ``w`` is a CTWindow (with ``surface``) or a PlanarMock.
    """
    i, s = cell
    if isinstance(w, PlanarMock):
        return w.subdivide(cell)
    if (i, s) not in w.cells:
        raise KeyError(f"cell {cell} is not in the window")
    if surface is None:
        raise ValueError("a surface is needed to look beyond the cell")
    ps = (w.vertices[(i, s)].x, w.vertices[(i, s)].y)
    pt = (w.vertices[(i, s + 1)].x, w.vertices[(i, s + 1)].y)
    corner = (ps[0], pt[1])
    base = QuadrantBase(w.vertex, reference_corner(surface, w.vertex))
    reach = max(ps[0], ps[1], pt[0], pt[1])
    chart = develop_ray(surface, base, i, reach + 1, cap=cap)
    where = chart.locate(from_quadrant_coords(i, corner))
    if isinstance(where[0], VertexHit):
        raise AxisTie("the inner corner of the step is a singularity")
    loc, sign = where
    apex = from_quadrant_coords(i, corner)
    radius = max(pt[0] - ps[0], ps[1] - pt[1])
    for _ in range(MAX_DOUBLINGS):
        radius = radius * 2
        dev = develop_from_point(surface, Location(loc.tri, loc.point), radius, sign=sign, apex=apex, cap=cap,
                                 prune=DominancePrune(i, apex))
        pts = [to_quadrant_coords(i, sg.point) for sg in dev.singularities]
        pts = [z for z in pts if z[0] - corner[0] <= radius and z[1] - corner[1] <= radius]
        try:
            qs, decided = rectangle_chain(ps, pt, pts)
        except WindowTooSmall:
            continue
        if decided:
            return partition(cell, ps, pt, qs)
    raise BudgetExhausted(f"cell {cell}: the rectangles beyond the step were not found")
