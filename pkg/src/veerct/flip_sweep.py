"""Sweeping the square Delaunay triangulation through one period of the flow.

As the aspect rho grows from rho0 to rho0 * lam^2 the Delaunay triangulation
changes by diagonal exchanges.  An edge PQ with neighbours C and D flips at the
aspect where the quadrilateral PDQC fits a rho-square with one vertex on each
side: P and Q on the vertical sides, C and D on the horizontal ones.  The sweep
keeps the triangulation intrinsically (triangles in their own frames, glued by
signs) and only anchors triangles on the surface to close up with the monodromy.

Each flip is a tetrahedron.  Its vertices are labelled L, B, R, T (0..3) by
position in the inscribed rectangle; the old diagonal is LR and the new one BT.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import planar as P
from .flat_surface import ConeSurface, Location, Monodromy, VertexHit, transport
from .square_delaunay import Cellulation, DelaunayCell, _rotation_match, delaunay, validate_cellulation
from .veering import (
    BLUE, EDGES, OPPOSITE, RED, EdgeColoring, IdealTriangulation, TautAngles, VeeringTriangulation,
)

L, B, R, T = 0, 1, 2, 3
# the upper faces of the model tetrahedron, by the label opposite them
TOP = {L: (B, R, T), R: (T, L, B)}


class DegenerateRect(ValueError):
    pass


class ClosureMismatch(RuntimeError):
    """The swept triangulation does not match the monodromy image of the start."""


class SweepError(RuntimeError):
    pass


def aspect_ratio(rect):
    """Exact height/width of a rectangle (an object with width and height, or a pair)."""
    w, h = (rect.width, rect.height) if hasattr(rect, "width") else rect
    if w == 0 or h == 0:
        raise DegenerateRect("rectangle has zero width or height")
    return h / w


# ---------------------------------------------------------------------------
# triangles and events
# ---------------------------------------------------------------------------

@dataclass
class TriangleRecord:
    rel: tuple                 # vertices about the centroid, counterclockwise, own frame
    vertices: tuple            # vertex classes of the surface
    anchor: Location           # canonical location of the centroid
    sign: int                  # chart(anchor.tri) = sign * rel + anchor.point
    created_by: Optional[tuple] = None    # (event, labels) with labels[slot] in L,B,R,T
    consumed_by: Optional[tuple] = None

    def key(self) -> tuple:
        return self.anchor.key()


@dataclass
class FlipEvent:
    quad: tuple                # points of L, B, R, T in a common frame
    ratio: object
    old_diagonal: tuple        # vertex classes of L and R
    new_diagonal: tuple        # vertex classes of B and T
    consumed: tuple            # two triangle ids
    created: tuple

    def rectangle(self) -> tuple:
        """Lower-left corner, width and height of the inscribed rectangle."""
        q = self.quad
        return (q[L][0], q[B][1]), q[R][0] - q[L][0], q[T][1] - q[B][1]

    def to_json(self) -> dict:
        return {"ratio": self.ratio.to_json(),
                "quad": [[x.to_json(), y.to_json()] for x, y in self.quad],
                "old_diagonal": list(self.old_diagonal), "new_diagonal": list(self.new_diagonal),
                "consumed": list(self.consumed), "created": list(self.created)}


@dataclass
class LayeredTriangulation:
    surface: ConeSurface
    phi: Monodromy
    base: Cellulation
    triangles: list            # TriangleRecord, the first len(base.cells) are the base
    events: list
    closure: dict              # final triangle id -> (base triangle id, rotation)
    rho0: object
    perturbation: Optional[str] = None

    @property
    def rho_end(self):
        lam = self.phi.dilatation
        return self.rho0 * lam * lam

    def to_json(self) -> dict:
        return {"rho0": self.rho0.to_json(), "perturbation": self.perturbation,
                "base": self.base.to_json(),
                "events": [e.to_json() for e in self.events],
                "closure": [{"final": f, "base": b, "rotation": r}
                            for f, (b, r) in sorted(self.closure.items())]}


# ---------------------------------------------------------------------------
# the kinetic triangulation
# ---------------------------------------------------------------------------

def _dilate(lam, p):
    return (p[0] * lam, p[1] / lam)


class _Kinetic:
    def __init__(self, surface: ConeSurface, base: Cellulation, cap=None):
        self.surface = surface
        self.cap = cap
        self.tris = [TriangleRecord(c.rel, c.vertices, c.anchor, c.sign) for c in base.cells]
        self.alive = set(range(len(self.tris)))
        self.adj = dict(base.adjacency)
        self.events: list = []

    # -- geometry of an edge ------------------------------------------------
    def quad(self, k: int, i: int):
        """The quadrilateral around edge i of triangle k, in k's frame.

        Returns (p, q, c, d, k2, j, g): p -> q is the edge, c the apex of k, d the
        apex of the neighbour k2 (whose frame is g * k's frame + const).
        """
        r = self.tris[k].rel
        p, q, c = r[i], r[(i + 1) % 3], r[(i + 2) % 3]
        k2, j, g = self.adj[(k, i)]
        s = self.tris[k2].rel
        off = P.sub(q, P.signed(g, s[j]))
        if P.key(P.add(P.signed(g, s[(j + 1) % 3]), off)) != P.key(p):
            raise SweepError(f"edge {i} of triangle {k} does not match its neighbour")
        d = P.add(P.signed(g, s[(j + 2) % 3]), off)
        return p, q, c, d, k2, j, g

    def critical_ratio(self, k: int, i: int):
        """Aspect at which edge i of k flips, or None if it never does going forward."""
        p, q, c, d, *_ = self.quad(k, i)
        pts = (p, q, c, d)
        xs = sorted(range(4), key=lambda n: P.fl(pts[n][0]))
        ys = sorted(range(4), key=lambda n: P.fl(pts[n][1]))
        lo_x, hi_x, lo_y, hi_y = xs[0], xs[3], ys[0], ys[3]
        if {lo_x, hi_x} != {0, 1} or {lo_y, hi_y} != {2, 3}:
            return None
        # floats only order; confirm the extremes exactly
        for n in range(4):
            if n != lo_x and not pts[n][0] > pts[lo_x][0]:
                return None
            if n != hi_x and not pts[n][0] < pts[hi_x][0]:
                return None
            if n != lo_y and not pts[n][1] > pts[lo_y][1]:
                return None
            if n != hi_y and not pts[n][1] < pts[hi_y][1]:
                return None
        return (pts[hi_y][1] - pts[lo_y][1]) / (pts[hi_x][0] - pts[lo_x][0])

    def edge_id(self, k: int, i: int) -> tuple:
        k2, j, _ = self.adj[(k, i)]
        return min((k, i), (k2, j))

    # -- the flip -----------------------------------------------------------
    def flip(self, k: int, i: int, ratio) -> FlipEvent:
        p, q, c, d, k2, j, g = self.quad(k, i)
        lft, rgt = (p, q) if p[0] < q[0] else (q, p)
        bot, top = (c, d) if c[1] < d[1] else (d, c)
        pts = (lft, bot, rgt, top)
        keys = [P.key(x) for x in pts]
        tk, tk2 = self.tris[k], self.tris[k2]

        def label(pt):
            return keys.index(P.key(pt))

        lab_k = tuple(label(x) for x in tk.rel)
        lab_k2 = tuple(label(P.add(P.signed(g, x), P.sub(q, P.signed(g, tk2.rel[j])))) for x in tk2.rel)
        vid = {}
        for labs, rec in ((lab_k, tk), (lab_k2, tk2)):
            for slot, lb in enumerate(labs):
                vid[lb] = rec.vertices[slot]
        n_ev = len(self.events)
        tk.consumed_by = (n_ev, lab_k)
        tk2.consumed_by = (n_ev, lab_k2)

        new_ids = []
        for face in (L, R):
            labs = TOP[face]
            corners = [pts[lb] for lb in labs]
            cen = P.centroid(corners)
            res = transport(self.surface, tk.anchor, P.signed(tk.sign, cen), cap=self.cap)
            if isinstance(res, VertexHit):
                raise SweepError("a new triangle has its centroid at a singularity")
            loc, sg = res
            rec = TriangleRecord(tuple(P.sub(x, cen) for x in corners), tuple(vid[lb] for lb in labs),
                                 loc, sg * tk.sign, created_by=(n_ev, labs))
            self.tris.append(rec)
            new_ids.append(len(self.tris) - 1)
        x1, x2 = new_ids

        # outer half-edges: label pair -> (old triangle, slot, frame factor)
        old = {}
        for tid, labs, f in ((k, lab_k, 1), (k2, lab_k2, g)):
            for s in range(3):
                old[(labs[s], labs[(s + 1) % 3])] = (tid, s, f)
        new_half = {}
        for tid, labs in ((x1, TOP[L]), (x2, TOP[R])):
            for s in range(3):
                new_half[(labs[s], labs[(s + 1) % 3])] = (tid, s)
        factor = {k: 1, k2: g}
        old_slots = {(tid, s): pair for pair, (tid, s, _) in old.items()}
        updates = {}
        for pair, (tid, s, f) in old.items():
            if pair in ((L, R), (R, L)):
                continue
            nt, ns = new_half[pair]
            n2, e2, sg = self.adj[(tid, s)]
            if (n2, e2) in old_slots:
                mt, ms = new_half[old_slots[(n2, e2)]]
                updates[(nt, ns)] = (mt, ms, f * sg * factor[n2])
            else:
                sign = f * sg
                updates[(nt, ns)] = (n2, e2, sign)
                updates[(n2, e2)] = (nt, ns, sign)
        updates[(x1, 2)] = (x2, 2, 1)
        updates[(x2, 2)] = (x1, 2, 1)
        for s in range(3):
            self.adj.pop((k, s), None)
            self.adj.pop((k2, s), None)
        self.adj.update(updates)
        self.alive -= {k, k2}
        self.alive |= {x1, x2}
        ev = FlipEvent(pts, ratio, (vid[L], vid[R]), (vid[B], vid[T]), (k, k2), (x1, x2))
        self.events.append(ev)
        return ev

    def cellulation(self, rho) -> Cellulation:
        """The current triangulation as a Cellulation (witness squares omitted)."""
        ids = sorted(self.alive)
        pos = {t: n for n, t in enumerate(ids)}
        cells = [DelaunayCell("Triangle", self.tris[t].anchor, self.tris[t].sign, self.tris[t].rel,
                              self.tris[t].vertices, None) for t in ids]
        adj = {(pos[a], i): (pos[b], j, s) for (a, i), (b, j, s) in self.adj.items()}
        return Cellulation(self.surface, rho, cells, adj)


def _shape_key(rec) -> tuple:
    """Position-independent description of a triangle on the surface."""
    return rec.anchor.key(), frozenset(P.key(P.signed(rec.sign, v)) for v in rec.rel)


# ---------------------------------------------------------------------------
# sweeping
# ---------------------------------------------------------------------------

def _generic_base(surface: ConeSurface, rho0, cap):
    """Delaunay triangulation at rho0, nudged upward if rho0 is itself a flip time."""
    base = delaunay(surface, rho0, cap=cap)
    if base.is_triangulation():
        return base, rho0, None
    for n in range(3, 40):
        eps = Fraction(1, 2 ** n)
        trial = rho0 * (1 + eps)
        cand = delaunay(surface, trial, check_saddles=False, cap=cap)
        if not cand.is_triangulation():
            continue
        half = delaunay(surface, rho0 * (1 + eps / 2), check_saddles=False, cap=cap)
        if half.is_triangulation() and half.combinatorics() == cand.combinatorics():
            return cand, trial, f"start aspect moved from {P.fl(rho0)} to {P.fl(trial)} (factor 1 + 2^-{n})"
    raise SweepError("could not find a flip-free start aspect near the requested one")


def sweep_period(surface: ConeSurface, phi: Monodromy, t0_scale=1, cap=None,
                 check: bool = False, tie_order: str = "canonical") -> LayeredTriangulation:
    """All diagonal exchanges with aspect in (rho0, rho0 * lam^2], and the closing match.

    ``t0_scale`` is the starting aspect rho0.  With ``check`` the kinetic state is
    validated and compared with a fresh Delaunay computation between consecutive
    events.  ``tie_order="reverse"`` applies equal-ratio events in the opposite
    order, which must give the same result.
    """
    rho0 = surface.field(t0_scale)
    base, rho0, note = _generic_base(surface, rho0, cap)
    lam = phi.dilatation
    rho_end = rho0 * lam * lam
    kin = _Kinetic(surface, base, cap)

    heap = []
    seq = 0

    def schedule(tid):
        nonlocal seq
        for i in range(3):
            r = kin.critical_ratio(tid, i)
            if r is None or r > rho_end:
                continue
            if not r > rho0:
                raise SweepError("an edge should already have flipped: start is not Delaunay")
            eid = kin.edge_id(tid, i)
            heapq.heappush(heap, (_Ratio(r), seq, eid))
            seq += 1

    for tid in sorted(kin.alive):
        schedule(tid)
    last = rho0
    while heap:
        r = heap[0][0].value
        batch = {}
        while heap and heap[0][0].value == r:
            _, _, (k, i) = heapq.heappop(heap)
            if k in kin.alive and (k, i) in kin.adj:
                batch.setdefault(kin.edge_id(k, i), (k, i))
        if not batch:
            continue
        if r < last:
            raise SweepError("events out of order")
        if check:
            _compare(kin, surface, (last + r) / 2, cap)
        # equal ratios: disjoint quads, applied in a canonical order
        order = sorted(batch.values(), key=lambda e: _quad_key(kin, *e), reverse=tie_order == "reverse")
        touched = set()
        for k, i in order:
            k2 = kin.adj[(k, i)][0]
            if k in touched or k2 in touched:
                raise SweepError("simultaneous events share a triangle")
            touched |= {k, k2}
        for k, i in order:
            if kin.critical_ratio(k, i) != r:
                raise SweepError("a simultaneous event changed another")
            ev = kin.flip(k, i, r)
            for tid in ev.created:
                schedule(tid)
        last = r
    if check:
        _compare(kin, surface, (last + rho_end) / 2, cap)
    closure = _close(kin, base, phi, lam, cap)
    return LayeredTriangulation(surface, phi, base, kin.tris, kin.events, closure, rho0, note)


@dataclass(order=False)
class _Ratio:
    value: object

    def __lt__(self, other):
        return self.value < other.value

    def __eq__(self, other):
        return self.value == other.value


def _quad_key(kin: _Kinetic, k: int, i: int) -> tuple:
    k2 = kin.adj[(k, i)][0]
    return tuple(sorted((kin.tris[k].key(), kin.tris[k2].key())))


def _compare(kin: _Kinetic, surface, rho, cap):
    rep = validate_cellulation(kin.cellulation(rho), cap)
    if not rep.ok:
        raise SweepError(f"kinetic triangulation is invalid at aspect {P.fl(rho)}: {rep.failures}")
    fresh = delaunay(surface, rho, check_saddles=False, cap=cap)
    want = {(c.anchor.key(), frozenset(P.key(P.signed(c.sign, v)) for v in c.rel)) for c in fresh.cells}
    got = {_shape_key(kin.tris[t]) for t in kin.alive}
    if want != got:
        raise SweepError(f"kinetic triangulation differs from the Delaunay one at aspect {P.fl(rho)}")


def _close(kin: _Kinetic, base: Cellulation, phi: Monodromy, lam, cap) -> dict:
    by_key = {c.key(): n for n, c in enumerate(base.cells)}
    closure = {}
    for f in sorted(kin.alive):
        rec = kin.tris[f]
        res = phi.apply(kin.surface, rec.anchor, cap=cap)
        if isinstance(res, VertexHit):
            raise ClosureMismatch(f"triangle {f}: centroid maps to a singularity")
        loc, sg = res
        b = by_key.get(loc.key())
        if b is None:
            raise ClosureMismatch(f"triangle {f} maps to no starting triangle")
        cell = base.cells[b]
        g = cell.sign * sg * rec.sign
        rot = _rotation_match(cell.rel, [_dilate(lam, v) for v in rec.rel], g)
        if rot is None:
            raise ClosureMismatch(f"triangle {f} and its image differ in shape")
        closure[f] = (b, rot)
    if sorted(b for b, _ in closure.values()) != list(range(len(base.cells))):
        raise ClosureMismatch("the monodromy does not match final and starting triangles one to one")
    return closure


# ---------------------------------------------------------------------------
# the mapping torus
# ---------------------------------------------------------------------------

def _slope_color(p, q) -> str:
    d = P.sub(q, p)
    s = P.sgn(d[0]) * P.sgn(d[1])
    if s == 0:
        raise SweepError("an edge is axis parallel")
    return RED if s > 0 else BLUE


def to_mapping_torus(layered: LayeredTriangulation) -> VeeringTriangulation:
    """One tetrahedron per flip, stacked and closed up by the monodromy."""
    tris = layered.triangles
    n = len(layered.events)
    if n == 0:
        raise SweepError("no flips in the period")

    def face_of(labels) -> int:
        return ({L, B, R, T} - set(labels)).pop()

    # follow a triangle upward (through the closure if it survives the period)
    # to the tetrahedron that consumes it; returns (event, labels, slot shift)
    def consumer(tid):
        shift = 0
        for _ in range(len(tris) + 1):
            rec = tris[tid]
            if rec.consumed_by is not None:
                ev, labs = rec.consumed_by
                return ev, tuple(labs[(s + shift) % 3] for s in range(3))
            if tid not in layered.closure:
                raise SweepError(f"triangle {tid} is neither consumed nor final")
            tid, rot = layered.closure[tid]
            shift = (shift + rot) % 3
        raise SweepError("a triangle survives every period")

    gl = {}
    for tid, rec in enumerate(tris):
        if rec.created_by is None:
            continue
        ev, up_labs = rec.created_by
        ev2, down_labs = consumer(tid)
        f1, f2 = face_of(up_labs), face_of(down_labs)
        perm = [0] * 4
        for s in range(3):
            perm[up_labs[s]] = down_labs[s]
        perm[f1] = f2
        gl[(ev, f1)] = (ev2, tuple(perm))
        inv = [0] * 4
        for a in range(4):
            inv[perm[a]] = a
        gl[(ev2, f2)] = (ev, tuple(inv))
    tri = IdealTriangulation(n, gl)
    taut = TautAngles([OPPOSITE[1]] * n)   # LR = (0, 2) and BT = (1, 3)
    colors = {}
    for tet, ev in enumerate(layered.events):
        for e, (a, b) in enumerate(EDGES):
            c = tri.edge_class[(tet, e)]
            col = _slope_color(ev.quad[a], ev.quad[b])
            if colors.setdefault(c, col) != col:
                raise SweepError(f"edge class {c} has edges of both slope signs")
    cols = EdgeColoring([colors[c] for c in range(tri.n_edges())])
    prov = {"ratios": [ev.ratio for ev in layered.events], "rho0": layered.rho0,
            "perturbation": layered.perturbation,
            "quads": [ev.quad for ev in layered.events],
            "frame_signs": [tris[ev.consumed[0]].sign for ev in layered.events],
            "vertex_classes": [(ev.old_diagonal[0], ev.new_diagonal[0], ev.old_diagonal[1], ev.new_diagonal[1])
                               for ev in layered.events]}
    return VeeringTriangulation(tri, taut, cols, prov)


def word_matrix(word: str):
    """Product of R = [[1, 1], [0, 1]] and L = [[1, 0], [1, 1]] along a word."""
    m = [[1, 0], [0, 1]]
    for ch in word.upper():
        if ch == "R":
            e = [[1, 1], [0, 1]]
        elif ch == "L":
            e = [[1, 0], [1, 1]]
        else:
            raise ValueError(f"letter {ch!r} is not R or L")
        m = [[m[0][0] * e[0][0] + m[0][1] * e[1][0], m[0][0] * e[0][1] + m[0][1] * e[1][1]],
             [m[1][0] * e[0][0] + m[1][1] * e[1][0], m[1][0] * e[0][1] + m[1][1] * e[1][1]]]
    return m
