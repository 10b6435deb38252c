"""Cusp cross-sections of a veering triangulation, their ladders and plane lifts.

A cusp torus is triangulated by the corners of the tetrahedra at that cusp.  The
triangle cut off at vertex ``v`` of a tetrahedron has the other three vertices
as corners; its side opposite corner ``w`` lies in tetrahedron face ``w``.  Its
tip is the corner ``w`` for which ``vw`` is a pi edge, and a corner takes the
colour of the edge of the 3-manifold running from the cusp through it.

The ladder structure is read off the colours: a side whose ends have the same
colour is a ladderpole edge, the other two sides are rungs.  Time gives every
ladderpole a direction ("up"), and the counterclockwise order of corners gives
left and right, so the ladders and poles come in one cyclic left-to-right order.

In the plane lift ladderpole ``i`` is a vertical line of vertices ``(i, s)``.  When
the triangulation remembers the flip rectangles it came from, vertex vectors at
the puncture are developed exactly: pole ``i`` then lies in quadrant ``i`` and
``s`` is normalized like a staircase index (``s = 0`` at the first vertex with
``x >= y``).  Otherwise the indices are combinatorial: pole 0 is red and s runs
with the time direction, downward on even poles and upward on odd ones.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import planar as P
from .veering import BLUE, RED, VeeringTriangulation, edge_index, model_labelling

L, B, R, T = 0, 1, 2, 3
# corners of the triangle at a vertex, counterclockwise, by the model label of the vertex
CCW = {B: (L, R, T), T: (R, L, B), L: (R, B, T), R: (L, T, B)}


class NoSuchCusp(ValueError):
    pass


class StructureViolation(ValueError):
    """A ladder fact fails; ``witness`` names the triangle, vertex or pole involved."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# cusps
# ---------------------------------------------------------------------------

def _find(parent, x):
    while parent.setdefault(x, x) != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _union(parent, a, b):
    a, b = _find(parent, a), _find(parent, b)
    if a != b:
        parent[max(a, b)] = min(a, b)


def cusps(v: VeeringTriangulation) -> list:
    """Vertex classes of the triangulation, each a sorted list of (tet, vertex)."""
    parent: dict = {}
    t = v.tri
    for tet in range(t.n_tets):
        for a in range(4):
            _find(parent, (tet, a))
    for (tet, f), (t2, p) in t.gluings.items():
        for a in range(4):
            if a != f:
                _union(parent, (tet, a), (t2, p[a]))
    classes: dict = {}
    for tet in range(t.n_tets):
        for a in range(4):
            classes.setdefault(_find(parent, (tet, a)), []).append((tet, a))
    return sorted(sorted(c) for c in classes.values())


# ---------------------------------------------------------------------------
# the cusp torus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinkTriangle:
    tet: int
    vertex: int
    corners: tuple          # the other three tetrahedron vertices, counterclockwise
    tip: int
    label: int              # model label (L, B, R, T) of ``vertex``

    def ends(self, w: int) -> tuple:
        """Ends of the side opposite corner w, in counterclockwise order."""
        k = self.corners.index(w)
        return self.corners[(k + 1) % 3], self.corners[(k + 2) % 3]


@dataclass
class CuspTorus:
    veering: VeeringTriangulation
    cusp: int
    triangles: list
    index: dict             # (tet, vertex) -> triangle id
    across: dict            # (triangle, w) -> (triangle', w'), the side opposite corner w
    corner_map: dict        # (triangle, w) -> {corner: corner'} for the shared side
    vertex: dict            # (triangle, corner) -> torus vertex id
    vertex_colors: list
    vertex_edge: list       # torus vertex -> edge class of the 3-manifold

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_colors)

    @property
    def n_edges(self) -> int:
        return 3 * len(self.triangles) // 2

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + len(self.triangles)

    def color(self, tri: int, w: int) -> str:
        return self.vertex_colors[self.vertex[(tri, w)]]

    def side_color(self, tri: int, w: int) -> str:
        """Colour of the tetrahedron edge joining the two ends of the side opposite w."""
        lt = self.triangles[tri]
        x, y = lt.ends(w)
        return self.veering.color_of(lt.tet, edge_index(x, y))

    def hinge(self, tri: int) -> bool:
        tip = self.triangles[tri].tip
        return self.color(tri, tip) != self.side_color(tri, tip)

    def surface_vertex(self) -> Optional[int]:
        prov = self.veering.provenance or {}
        vc = prov.get("vertex_classes")
        if vc is None:
            return None
        lt = self.triangles[0]
        return vc[lt.tet][lt.vertex]

    def to_json(self) -> dict:
        return {"cusp": self.cusp,
                "vertices": [{"id": n, "color": c, "edge_class": e}
                             for n, (c, e) in enumerate(zip(self.vertex_colors, self.vertex_edge))],
                "triangles": [{"tet": lt.tet, "vertex": lt.vertex,
                               "corners": [self.vertex[(n, w)] for w in lt.corners],
                               "tip": self.vertex[(n, lt.tip)], "hinge": self.hinge(n)}
                              for n, lt in enumerate(self.triangles)]}


def cusp_triangulation(v: VeeringTriangulation, cusp: int = 0) -> CuspTorus:
    """The triangulated torus of corners at one cusp."""
    classes = cusps(v)
    if not 0 <= cusp < len(classes):
        raise NoSuchCusp(f"cusp {cusp} does not exist; there are {len(classes)}")
    members = classes[cusp]
    tris, index = [], {}
    for tet, a in members:
        lab = model_labelling(v.taut.pi_edges[tet])
        by_label = {lab[x]: x for x in range(4)}
        corners = tuple(by_label[c] for c in CCW[lab[a]])
        tip = next(w for w in corners if edge_index(a, w) in v.taut.pi_edges[tet])
        index[(tet, a)] = len(tris)
        tris.append(LinkTriangle(tet, a, corners, tip, lab[a]))

    across, corner_map = {}, {}
    parent: dict = {}
    for n, lt in enumerate(tris):
        for w in lt.corners:
            _find(parent, (n, w))
    for n, lt in enumerate(tris):
        for f in lt.corners:
            t2, p = v.tri.gluings[(lt.tet, f)]
            m = index[(t2, p[lt.vertex])]
            across[(n, f)] = (m, p[f])
            x, y = lt.ends(f)
            corner_map[(n, f)] = {x: p[x], y: p[y]}
            if tris[m].ends(p[f]) != (p[y], p[x]):
                raise StructureViolation(f"triangles {n} and {m} induce the same orientation on their "
                                         "common side", (n, m))
            _union(parent, (n, x), (m, p[x]))
            _union(parent, (n, y), (m, p[y]))
    roots = sorted({_find(parent, (n, w)) for n, lt in enumerate(tris) for w in lt.corners})
    vid = {r: k for k, r in enumerate(roots)}
    vertex = {(n, w): vid[_find(parent, (n, w))] for n, lt in enumerate(tris) for w in lt.corners}
    colors: list = [None] * len(roots)
    edges: list = [None] * len(roots)
    for (n, w), k in sorted(vertex.items()):
        lt = tris[n]
        e = v.tri.edge_class[(lt.tet, edge_index(lt.vertex, w))]
        if edges[k] is not None and edges[k] != e:
            raise StructureViolation(f"torus vertex {k} lies on two edge classes", k)
        edges[k] = e
        colors[k] = v.colors.colors[e]
    return CuspTorus(v, cusp, tris, index, across, corner_map, vertex, colors, edges)


# ---------------------------------------------------------------------------
# ladders
# ---------------------------------------------------------------------------

@dataclass
class Ladderpole:
    index: int
    vertices: list          # torus vertices, upward cyclic order
    color: str              # colour of its vertices
    edge_color: str         # colour of its edges (the opposite one)


@dataclass
class Rung:
    left: int               # position on the left pole
    right: int              # position on the right pole


@dataclass
class Ladder:
    index: int              # lies between poles index - 1 and index (mod the pole count)
    triangles: list         # torus triangles, upward
    sides: list             # per triangle: "L" or "R", the pole carrying its ladderpole edge
    start: Rung             # lower rung of the first triangle, as pole positions
    ascending: bool

    def rungs(self):
        """Lower rung of each triangle in turn, positions unwrapped."""
        a, b = self.start.left, self.start.right
        out = []
        for side in self.sides:
            out.append(Rung(a, b))
            if side == "L":
                a += 1
            else:
                b += 1
        return out


@dataclass
class TriangleRole:
    tail: int               # corner at the lower end of the ladderpole edge
    head: int               # corner at its upper end
    third: int              # corner on the other pole
    side: str               # "L" if the ladderpole edge is on the ladder's left pole


@dataclass
class LadderDecomposition:
    torus: CuspTorus
    poles: list
    ladders: list
    roles: list             # per triangle
    ladder_of: list         # per triangle
    position: dict          # torus vertex -> (pole, position)

    @property
    def n_poles(self) -> int:
        return len(self.poles)

    def hinge(self, tri: int) -> bool:
        return self.torus.hinge(tri)

    def ladder_sizes(self) -> list:
        return [len(ld.triangles) for ld in self.ladders]


def _pole_side(c: CuspTorus, n: int) -> int:
    lt = c.triangles[n]
    same = [w for w in lt.corners if len({c.color(n, x) for x in lt.ends(w)}) == 1]
    if len(same) != 1:
        raise StructureViolation(f"triangle {n} has {len(same)} sides with equal end colours", n)
    return same[0]


def ladder_decomposition(c: CuspTorus) -> LadderDecomposition:
    """Ladderpoles, ladders and their cyclic order, with every structural check."""
    tris = c.triangles
    roles = []
    for n, lt in enumerate(tris):
        w = _pole_side(c, n)
        x, y = lt.ends(w)
        if lt.tip not in (x, y):
            raise StructureViolation(f"the tip of triangle {n} is not on its ladderpole edge", n)
        if c.side_color(n, w) == c.color(n, x):
            raise StructureViolation(f"ladderpole edge of triangle {n} has the colour of its ends", n)
        other = y if lt.tip == x else x
        # the tip is above the base for triangles at B or T and below it at L or R
        tail, head = (other, lt.tip) if lt.label in (B, T) else (lt.tip, other)
        side = "R" if lt.ends(w) == (tail, head) else "L"
        roles.append(TriangleRole(tail, head, w, side))

    # directions agree across each ladderpole edge, and poles are directed cycles
    out_edge: dict = {}
    in_edge: dict = {}
    for n, role in enumerate(roles):
        m, w2 = c.across[(n, role.third)]
        cm = c.corner_map[(n, role.third)]
        r2 = roles[m]
        if r2.third != w2 or (cm[role.tail], cm[role.head]) != (r2.tail, r2.head):
            raise StructureViolation(f"ladderpole edge between triangles {n} and {m} has no consistent "
                                     "upward direction", (n, m))
        if role.side == "R":
            a, b = c.vertex[(n, role.tail)], c.vertex[(n, role.head)]
            if a in out_edge or b in in_edge:
                raise StructureViolation(f"torus vertex {a if a in out_edge else b} lies on more than two "
                                         "ladderpole edges", a)
            out_edge[a] = b
            in_edge[b] = a
    for k in range(c.n_vertices):
        if k not in out_edge or k not in in_edge:
            raise StructureViolation(f"torus vertex {k} does not lie on exactly two ladderpole edges", k)

    seen: set = set()
    cycles = []
    for k in range(c.n_vertices):
        if k in seen:
            continue
        cyc = [k]
        seen.add(k)
        while out_edge[cyc[-1]] != k:
            cyc.append(out_edge[cyc[-1]])
            seen.add(cyc[-1])
        cycles.append(cyc)
    pole_of = {k: p for p, cyc in enumerate(cycles) for k in cyc}

    # ladders: triangles joined across rungs, walked upward
    ladder_of = [-1] * len(tris)
    walks = []
    for n in range(len(tris)):
        if ladder_of[n] >= 0:
            continue
        walk = [n]
        ladder_of[n] = len(walks)
        while True:
            cur = walk[-1]
            nxt, _ = c.across[(cur, roles[cur].tail)]
            if nxt == n:
                break
            if ladder_of[nxt] >= 0:
                raise StructureViolation(f"the ladder through triangle {n} is not a cycle", n)
            ladder_of[nxt] = len(walks)
            walk.append(nxt)
        walks.append(walk)

    # left and right poles of each ladder
    bounds = []
    for walk in walks:
        left, right = set(), set()
        for n in walk:
            role = roles[n]
            p = pole_of[c.vertex[(n, role.tail)]]
            (left if role.side == "L" else right).add(p)
            q = pole_of[c.vertex[(n, role.third)]]
            (right if role.side == "L" else left).add(q)
        if len(left) != 1 or len(right) != 1 or left == right:
            raise StructureViolation(f"ladder through triangle {walk[0]} does not lie between two poles",
                                     walk[0])
        bounds.append((left.pop(), right.pop()))
    right_of = {}
    for k, (lp, rp) in enumerate(bounds):
        if lp in right_of:
            raise StructureViolation(f"pole {lp} is the left side of two ladders", lp)
        right_of[lp] = k
    if len(right_of) != len(cycles):
        raise StructureViolation("some pole is not the left side of any ladder")

    # cyclic order, starting at the red pole with the smallest vertex
    first = min((cyc[0], p) for p, cyc in enumerate(cycles) if c.vertex_colors[cyc[0]] == RED)[1] \
        if any(c.vertex_colors[cyc[0]] == RED for cyc in cycles) else 0
    order = [first]
    lad_order = []
    while True:
        k = right_of[order[-1]]
        lad_order.append(k)
        nxt = bounds[k][1]
        if nxt == first:
            break
        order.append(nxt)
    if len(order) != len(cycles):
        raise StructureViolation("ladderpoles do not form a single cyclic sequence")
    m = len(order)

    poles = []
    position = {}
    for i, p in enumerate(order):
        cyc = cycles[p]
        cyc = cyc[cyc.index(min(cyc)):] + cyc[:cyc.index(min(cyc))]
        col = c.vertex_colors[cyc[0]]
        if any(c.vertex_colors[k] != col for k in cyc):
            raise StructureViolation(f"pole {i} has vertices of both colours", i)
        for s, k in enumerate(cyc):
            position[k] = (i, s)
        poles.append(Ladderpole(i, cyc, col, BLUE if col == RED else RED))
    for i in range(m):
        if poles[i].color == poles[(i + 1) % m].color:
            raise StructureViolation(f"poles {i} and {(i + 1) % m} have the same colour", i)

    ladders = [None] * m
    for i, k in enumerate(lad_order):
        j = (i + 1) % m     # ladder to the right of pole i
        walk = walks[k]
        start = min(range(len(walk)), key=lambda t: walk[t])
        walk = walk[start:] + walk[:start]
        sides = [roles[n].side for n in walk]
        n0, r0 = walk[0], roles[walk[0]]
        lo_pole = c.vertex[(n0, r0.tail)]
        lo_other = c.vertex[(n0, r0.third)]
        if r0.side == "L":
            a, b = position[lo_pole][1], position[lo_other][1]
        else:
            a, b = position[lo_other][1], position[lo_pole][1]
        asc = [roles[n].head == tris[n].tip for n in walk]
        if len(set(asc)) != 1:
            raise StructureViolation(f"ladder {j} has tips on both sides of its base rungs", j)
        ladders[j] = Ladder(j, walk, sides, Rung(a, b), asc[0])
        # the walk visits each edge of both poles once
        nl, nr = sides.count("L"), sides.count("R")
        if nl != len(poles[(j - 1) % m].vertices) or nr != len(poles[j].vertices):
            raise StructureViolation(f"ladder {j} does not wind once along its poles", j)
    for n, lt in enumerate(tris):
        ladder_of[n] = next(ld.index for ld in ladders if n in ld.triangles)
    for j in range(m):
        if ladders[j].ascending == ladders[(j + 1) % m].ascending:
            raise StructureViolation(f"ladders {j} and {(j + 1) % m} are both "
                                     f"{'ascending' if ladders[j].ascending else 'descending'}", j)
    # rungs connect consecutive poles
    for ld in ladders:
        for t, n in enumerate(ld.triangles):
            role = roles[n]
            pl = position[c.vertex[(n, role.tail)]][0]
            po = position[c.vertex[(n, role.third)]][0]
            want = ((ld.index - 1) % m, ld.index) if role.side == "L" else (ld.index, (ld.index - 1) % m)
            if (pl, po) != want:
                raise StructureViolation(f"a rung of triangle {n} skips a pole", n)
    return LadderDecomposition(c, poles, ladders, roles, ladder_of, position)


# ---------------------------------------------------------------------------
# exact development at the puncture
# ---------------------------------------------------------------------------

def _mat_mul(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def _mat_vec(a, v):
    return (a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1])


def _mat_inv(a):
    d = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return ((a[1][1] / d, -a[0][1] / d), (-a[1][0] / d, a[0][0] / d))


def _cols(u, v):
    return ((u[0], v[0]), (u[1], v[1]))


def _mat_key(a):
    return (P.key(a[0]), P.key(a[1]))


class GeometryMismatch(StructureViolation):
    """The flip rectangles do not develop consistently around the puncture."""


@dataclass
class _Development:
    base: dict              # (pole, position) -> plane vector, poles 0..m, one period
    dv: tuple               # vertical deck matrix
    dh: tuple               # horizontal deck matrix (pole i -> i + m)


def _corner_vec(c: CuspTorus, tri: int, w: int):
    lt = c.triangles[tri]
    quad = c.veering.provenance["quads"][lt.tet]
    return P.sub(quad[w], quad[lt.vertex])


def _transition(c: CuspTorus, tri: int, w: int):
    """Matrix taking the neighbour's frame across side w into this triangle's frame."""
    m, _ = c.across[(tri, w)]
    cm = c.corner_map[(tri, w)]
    x, y = c.triangles[tri].ends(w)
    e = _cols(_corner_vec(c, tri, x), _corner_vec(c, tri, y))
    f = _cols(_corner_vec(c, m, cm[x]), _corner_vec(c, m, cm[y]))
    a = _mat_mul(e, _mat_inv(f))
    if P.sgn(a[0][1]) != 0 or P.sgn(a[1][0]) != 0 or a[0][0] * a[1][1] != 1:
        raise GeometryMismatch(f"triangles {tri} and {m} are not related by a diagonal map", (tri, m))
    return m, a


def _develop(d: LadderDecomposition) -> _Development:
    c = d.torus
    m = d.n_poles
    prov = c.veering.provenance
    f = c.triangles[0]
    one, zero = prov["quads"][f.tet][0][0].field.one(), prov["quads"][f.tet][0][0].field.zero()
    sign = prov.get("frame_signs", [1] * c.veering.tri.n_tets)

    def ladder_chain(lad: Ladder, t0: int, m0, span: int):
        """Matrices of lifted triangles t0-span .. t0+span of a ladder, from one known matrix."""
        size = len(lad.triangles)
        mats = {t0: m0}
        for t in range(t0, t0 + span):
            n = lad.triangles[t % size]
            nxt, a = _transition(c, n, d.roles[n].tail)
            mats[t + 1] = _mat_mul(mats[t], a)
        for t in range(t0, t0 - span, -1):
            n = lad.triangles[t % size]
            # the triangle below n lies across its lower rung, opposite the head
            prv, a = _transition(c, n, d.roles[n].head)
            mats[t - 1] = _mat_mul(mats[t], a)
        return mats

    rungs = {j: d.ladders[j % m].rungs() for j in range(m)}

    def lifted_rung(j: int, t: int):
        lad = d.ladders[j % m]
        size = len(lad.triangles)
        q, r = divmod(t, size)
        rg = rungs[j % m][r]
        nl = len(d.poles[(j - 1) % m].vertices)
        nr = len(d.poles[j % m].vertices)
        return rg.left + q * nl, rg.right + q * nr

    s0 = sign[c.triangles[d.ladders[1 % m].triangles[0]].tet]
    mats = {}
    lad1 = d.ladders[1 % m]
    first = ((s0 * one, zero), (zero, s0 * one))
    mats[1] = ladder_chain(lad1, 0, first, 2 * len(lad1.triangles) + 2)
    size1 = len(lad1.triangles)
    dv = _mat_mul(mats[1][size1], _mat_inv(mats[1][0]))
    for j in range(1, m + 1):
        lad = d.ladders[j % m]
        size = len(lad.triangles)
        nxt = d.ladders[(j + 1) % m]
        t = next(t for t in range(size) if lad.sides[t] == "R")
        n = lad.triangles[t]
        nb, a = _transition(c, n, d.roles[n].third)
        k = lifted_rung(j, t)[1]      # lower end of the pole edge on pole j
        # find the lifted triangle of ladder j+1 with left pole edge starting at k
        nsize = len(nxt.triangles)
        t2 = None
        for q in range(-3, 4):
            for r in range(nsize):
                tt = r + q * nsize
                if nxt.sides[r] == "L" and lifted_rung(j + 1, tt)[0] == k:
                    t2 = tt
        if t2 is None or nxt.triangles[t2 % nsize] != nb:
            raise GeometryMismatch(f"cannot match ladders {j} and {j + 1} along pole {j}", j)
        mats[j + 1] = ladder_chain(nxt, t2, _mat_mul(mats[j][t], a), abs(t2) + 2 * nsize + 2)
    dh = _mat_mul(mats[m + 1][0], _mat_inv(mats[1][0]))

    base = {}
    for j in range(1, m + 2):
        lad = d.ladders[j % m]
        size = len(lad.triangles)
        for t in range(-size, 2 * size):
            if t not in mats[j]:
                continue
            n = lad.triangles[t % size]
            role = d.roles[n]
            kl, kr = lifted_rung(j, t)
            if role.side == "L":
                pts = [((j - 1, kl), role.tail), ((j - 1, kl + 1), role.head), ((j, kr), role.third)]
            else:
                pts = [((j, kr), role.tail), ((j, kr + 1), role.head), ((j - 1, kl), role.third)]
            for vid, w in pts:
                vec = _mat_vec(mats[j][t], _corner_vec(c, n, w))
                old = base.setdefault(vid, vec)
                if P.key(old) != P.key(vec):
                    raise GeometryMismatch(f"vertex {vid} develops to two different vectors", vid)
    dev = _Development(base, dv, dh)
    # deck consistency of the development
    for (i, k), vec in list(base.items()):
        n = len(d.poles[i % m].vertices)
        up = base.get((i, k + n))
        if up is not None and P.key(up) != P.key(_mat_vec(dv, vec)):
            raise GeometryMismatch(f"vertical translation is not linear at vertex {(i, k)}", (i, k))
        side = base.get((i + m, k))
        if side is not None and P.key(side) != P.key(_mat_vec(dh, vec)):
            raise GeometryMismatch(f"horizontal translation is not linear at vertex {(i, k)}", (i, k))
    return dev


def _mat_pow(a, e: int):
    if e < 0:
        a, e = _mat_inv(a), -e
    one = a[0][0] - a[0][0] + 1
    zero = one - one
    out = ((one, zero), (zero, one))
    for _ in range(e):
        out = _mat_mul(out, a)
    return out


# ---------------------------------------------------------------------------
# plane windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinkVertex:
    id: tuple               # (pole i, position s)
    color: str
    torus_vertex: int
    coords: Optional[tuple] = None   # quadrant coordinates (x along ray i + 1, y along ray i)


@dataclass(frozen=True)
class WindowTriangle:
    ladder: int             # lies between poles ladder - 1 and ladder
    corners: tuple          # counterclockwise in the schematic drawing
    pole_edge: tuple        # (lower, upper) in time
    third: tuple            # the corner on the other pole
    tip: tuple
    side: str               # "L" or "R": pole carrying the ladderpole edge
    hinge: bool
    ascending: bool
    tet: int
    torus_triangle: int

    @property
    def base(self) -> tuple:
        """The base rung: the side opposite the tip."""
        return tuple(v for v in self.corners if v != self.tip)

    def rung_sides(self) -> tuple:
        return tuple((v, self.third) for v in self.pole_edge)


@dataclass
class LinkWindow:
    poles: tuple            # inclusive range of pole indices
    positions: tuple        # half-open range of s
    vertices: dict          # id -> LinkVertex
    triangles: list
    pole_count: int
    pole_lengths: dict      # pole index -> vertices per vertical period
    geometric: bool
    shifts: dict = field(default_factory=dict)   # pole -> s offset of one vertical period
    degrees: dict = field(default_factory=dict)  # torus vertex -> triangles around it

    def full_vertices(self) -> set:
        """Vertices with every surrounding triangle inside the window."""
        have = Counter(x for t in self.triangles for x in t.corners)
        return {k for k, v in self.vertices.items() if have[k] == self.degrees.get(v.torus_vertex, -1)}

    def pole_edges(self) -> list:
        out = set()
        for t in self.triangles:
            out.add(tuple(sorted(t.pole_edge)))
        return sorted(out)

    def rungs(self) -> list:
        out = set()
        for t in self.triangles:
            for a, b in t.rung_sides():
                out.add(tuple(sorted((a, b))))
        return sorted(out)

    def edges(self) -> list:
        return [("pole",) + e for e in self.pole_edges()] + [("rung",) + e for e in self.rungs()]

    def ladder(self, j: int) -> list:
        return [t for t in self.triangles if t.ladder == j]

    def is_empty(self) -> bool:
        return not self.vertices

    def to_json(self) -> dict:
        def coords(v):
            if v.coords is None:
                return None
            return [v.coords[0].to_json(), v.coords[1].to_json()]
        return {"poles": list(self.poles), "positions": list(self.positions),
                "geometric": self.geometric,
                "vertices": [{"id": list(k), "color": v.color, "coords": coords(v)}
                             for k, v in sorted(self.vertices.items())],
                "triangles": [{"ladder": t.ladder, "corners": [list(x) for x in t.corners],
                               "tip": list(t.tip), "hinge": t.hinge, "ascending": t.ascending,
                               "tet": t.tet} for t in self.triangles]}


def _centered(depth: int) -> tuple:
    return -(depth // 2), depth - depth // 2


def _has_geometry(v: VeeringTriangulation) -> bool:
    return bool(v.provenance) and "quads" in v.provenance


def unroll(c, poles=(0, 2), positions=6, geometry: Optional[bool] = None) -> LinkWindow:
    """A finite window of the plane lift of the cusp torus.

    ``poles`` is an inclusive range of pole indices and ``positions`` either a
    half-open range of s or a depth n, meaning s in [-(n // 2), n - n // 2).
    Triangles are kept when all three corners lie in the window.
    """
    d = c if isinstance(c, LadderDecomposition) else ladder_decomposition(c)
    torus = d.torus
    if isinstance(positions, int):
        positions = _centered(positions)
    lo, hi = poles
    s_lo, s_hi = positions
    if geometry is None:
        geometry = _has_geometry(torus.veering)
    m = d.n_poles
    lengths = {}
    if hi < lo or s_hi <= s_lo:
        return LinkWindow((lo, hi), (s_lo, s_hi), {}, [], m, lengths, geometry)

    # provisional pole p is final pole p + delta; s = eps * (k - kstar(p)) with eps by parity
    delta, kstar, coords_of = 0, (lambda p: 0), None
    if geometry:
        delta, kstar, coords_of = _normalize(d, _develop(d))
    finals = range(lo, hi + 1)

    def eps(i):
        return -1 if i % 2 == 0 else 1

    def k_of(i, s):
        return kstar(i - delta) + eps(i) * s

    def s_of(i, k):
        return eps(i) * (k - kstar(i - delta))

    vertices = {}
    for i in finals:
        p = i - delta
        pole = d.poles[p % m]
        n = len(pole.vertices)
        lengths[i] = n
        for s in range(s_lo, s_hi):
            k = k_of(i, s)
            tv = pole.vertices[k % n]
            co = coords_of(p, k, i) if geometry else None
            vertices[(i, s)] = LinkVertex((i, s), pole.color, tv, co)

    triangles = []
    for j in range(lo + 1, hi + 1):
        pj = j - delta
        lad = d.ladders[pj % m]
        size = len(lad.triangles)
        rg = lad.rungs()
        nl = len(d.poles[(pj - 1) % m].vertices)
        nr = len(d.poles[pj % m].vertices)
        kls = [k_of(j - 1, s) for s in range(s_lo, s_hi)]
        krs = [k_of(j, s) for s in range(s_lo, s_hi)]
        q_lo = min((min(kls) - rg[0].left) // nl, (min(krs) - rg[0].right) // nr) - 1
        q_hi = max((max(kls) - rg[0].left) // nl, (max(krs) - rg[0].right) // nr) + 1
        for q in range(q_lo, q_hi + 1):
            for r in range(size):
                n = lad.triangles[r]
                role = d.roles[n]
                kl, kr = rg[r].left + q * nl, rg[r].right + q * nr
                left = lambda k: (j - 1, s_of(j - 1, k))
                right = lambda k: (j, s_of(j, k))
                if role.side == "L":
                    tail, head, third = left(kl), left(kl + 1), right(kr)
                    corners = (tail, third, head)
                else:
                    tail, head, third = right(kr), right(kr + 1), left(kl)
                    corners = (tail, head, third)
                if not all(x in vertices for x in corners):
                    continue
                lt = torus.triangles[n]
                tip = head if role.head == lt.tip else tail
                triangles.append(WindowTriangle(j, corners, (tail, head), third, tip, role.side,
                                                torus.hinge(n), lad.ascending, lt.tet, n))
    triangles.sort(key=lambda t: (t.ladder, sorted(t.corners)))
    shifts = {i: eps(i) * lengths[i] for i in finals}
    degrees = Counter(torus.vertex[(n, w)] for n, lt in enumerate(torus.triangles) for w in lt.corners)
    return LinkWindow((lo, hi), (s_lo, s_hi), vertices, triangles, m, lengths, geometry, shifts,
                      dict(sorted(degrees.items())))


def _normalize(d: LadderDecomposition, dev: _Development):
    """Quadrant offset and the s = 0 positions, from the developed vectors."""
    from .flat_surface import _quarter, to_quadrant_coords
    m = d.n_poles
    quarters = []
    for p in range(m + 1):
        n = len(d.poles[p % m].vertices)
        qs = {_quarter(_vec(d, dev, p, k)) for k in range(n)}
        if len(qs) != 1:
            raise GeometryMismatch(f"pole {p} has vertices in several quadrants", p)
        quarters.append(qs.pop())
    for p in range(m):
        if (quarters[p + 1] - quarters[p]) % 4 != 1:
            raise GeometryMismatch(f"pole {p + 1} does not follow pole {p} clockwise", p)
    delta = quarters[0]
    found: dict = {}

    def kstar(p):
        if p not in found:
            found[p] = _find_kstar(d, dev, p, delta)
        return found[p]

    def coords_of(p, k, i):
        return to_quadrant_coords(i, _vec(d, dev, p, k))

    return delta, kstar, coords_of


def _vec(d: LadderDecomposition, dev: _Development, p: int, k: int):
    m = d.n_poles
    h, p0 = divmod(p, m)
    n = len(d.poles[p0].vertices)
    q, r = divmod(k, n)
    v = dev.base[(p0, r)] if (p0, r) in dev.base else None
    if v is None:
        # pole 0 may only be reached through the lift at m
        v = _mat_vec(_mat_inv(dev.dh), dev.base[(p0 + m, r)])
    v = _mat_vec(_mat_pow(dev.dv, q), v)
    return _mat_vec(_mat_pow(dev.dh, h), v)


def _find_kstar(d: LadderDecomposition, dev: _Development, p: int, delta: int) -> int:
    from .flat_surface import to_quadrant_coords
    i = p + delta
    ascending_x = i % 2 == 1      # x grows with k on odd poles, shrinks on even ones

    def z(k):
        return to_quadrant_coords(i, _vec(d, dev, p, k))

    def ok(k):
        x, y = z(k)
        return x >= y

    # monotonicity along the pole, checked on one period and a step beyond
    n = len(d.poles[p % d.n_poles].vertices)
    for k in range(-1, n + 1):
        a, b = z(k), z(k + 1)
        if ascending_x != (b[0] > a[0]) or ascending_x != (b[1] < a[1]):
            raise GeometryMismatch(f"pole {i} is not monotone in time at position {k}", (i, k))
    step = 1 if ascending_x else -1
    k = 0
    # move to a position with x >= y, then back off to the first such along increasing x
    for _ in range(10_000):
        if ok(k):
            break
        k += step
    else:
        raise GeometryMismatch(f"pole {i} never reaches the diagonal", i)
    for _ in range(10_000):
        if not ok(k - step):
            return k
        k -= step
    raise GeometryMismatch(f"pole {i} never leaves the diagonal", i)
