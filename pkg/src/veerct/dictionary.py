"""Translation between the cusp-link ladders and the Cannon-Thurston cells.

Both tessellations live on the same vertex set: vertex (i, s) is the s-th
ruling singularity of quadrant i and the s-th vertex of ladderpole i.

* Link to CT: in each ladder, join the tip of every triangle to the tip of the
  next triangle across its base rung.  Inside ladder j these arcs form one path,
  which runs along the ray j of the tessellation.
* CT to link: join each gate of a cell to the spikes on one side of it (blue
  cells turn clockwise, red cells counterclockwise), add the ladderpole edge
  between the gates and merge parallel copies.

``verify_dictionary`` checks the correspondence row by row on the part of the
windows where both are complete.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import planar as P
from .ct_tess import CROSS_FURROW, IN_FURROW, CTCell, CTWindow, RulingSingularity, furrow_color
from .cusp_link import LinkVertex, LinkWindow, StructureViolation, WindowTriangle, unroll

POLE, RUNG = "Pole", "Rung"


class IncompleteWindow(ValueError):
    """A translation step needs data outside the window."""


class IncompatibleWindows(ValueError):
    """The two windows do not describe the same region of the same bundle."""


def _eps(i: int) -> int:
    # time runs towards smaller s on even poles
    return -1 if i % 2 == 0 else 1


def _pair(u, v) -> tuple:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class SkeletonEdge:
    u: tuple
    v: tuple
    kind: str               # InFurrow / CrossFurrow, or Pole / Rung
    ladder: Optional[int]   # ray or ladder carrying the edge
    source: object = None   # triangle or cell it came from

    @property
    def ends(self) -> tuple:
        return _pair(self.u, self.v)


@dataclass
class SkeletonGraph:
    """A window of a planar 1-skeleton; parallel edges are kept."""
    flavour: str                        # "ct" or "agol"
    vertices: dict                      # id -> colour
    coords: dict                        # id -> (x, y) or None
    edges: list
    paths: dict = field(default_factory=dict)       # ladder -> segments of tip-to-tip arcs, outwards
    faces: list = field(default_factory=list)
    incomplete: list = field(default_factory=list)  # sources whose edge could not be drawn

    def edge_counts(self) -> Counter:
        return Counter((e.ladder, e.ends) if self.flavour == "ct" else e.ends for e in self.edges)

    def edge_set(self) -> set:
        return {e.ends for e in self.edges}

    def restricted(self, keep: set) -> Counter:
        """Edge multiset on the given vertex set."""
        out = Counter()
        for key, n in self.edge_counts().items():
            ends = key[1] if self.flavour == "ct" else key
            if ends[0] in keep and ends[1] in keep:
                out[key] += n
        return out

    def to_json(self) -> dict:
        def c(vid):
            z = self.coords.get(vid)
            return None if z is None else [P.fl(z[0]), P.fl(z[1])]
        return {"flavour": self.flavour,
                "vertices": [{"id": list(k), "color": col, "coords": c(k)}
                             for k, col in sorted(self.vertices.items())],
                "edges": [{"ends": [list(e.ends[0]), list(e.ends[1])], "kind": e.kind, "ladder": e.ladder}
                          for e in sorted(self.edges, key=lambda e: (e.ends, e.kind, e.ladder is None, e.ladder or 0))],
                "paths": {str(j): [[list(x) for x in seg] for seg in segs] for j, segs in sorted(self.paths.items())},
                "incomplete": len(self.incomplete)}


# ---------------------------------------------------------------------------
# link -> CT
# ---------------------------------------------------------------------------

def _next_across_base(w: LinkWindow) -> dict:
    """Triangle index -> index of the triangle across its base rung, where present."""
    by_rung: dict = {}
    for n, t in enumerate(w.triangles):
        for r in t.rung_sides():
            by_rung.setdefault((t.ladder, frozenset(r)), []).append(n)
    out = {}
    for n, t in enumerate(w.triangles):
        base = frozenset(t.base)
        others = [m for m in by_rung.get((t.ladder, base), []) if m != n]
        if len(others) > 1:
            raise StructureViolation(f"rung {sorted(base)} borders three triangles", sorted(base))
        if others:
            out[n] = others[0]
    return out


def _segments(succ: dict) -> list:
    """Maximal chains of a partial injective successor map, each listed from its start."""
    pred = {v: u for u, v in succ.items()}
    if len(pred) != len(succ):
        raise StructureViolation("two arcs of one ladder end at the same vertex")
    segs = []
    for start in sorted(set(succ) - set(pred)):
        seg = [start]
        while seg[-1] in succ:
            seg.append(succ[seg[-1]])
        segs.append(seg)
    if sum(len(s) - 1 for s in segs) != len(succ):
        raise StructureViolation("tip-to-tip arcs close up into a loop")
    return segs


def agol_to_ct(w: LinkWindow, strict: bool = False) -> SkeletonGraph:
    """Tip-to-tip arcs of every ladder.

    An arc whose next triangle lies outside the window is recorded in
    ``incomplete``; with ``strict`` it raises IncompleteWindow instead.
    """
    nxt = _next_across_base(w)
    edges, missing = [], []
    succ: dict = {}
    for n, t in enumerate(w.triangles):
        if n not in nxt:
            if strict:
                raise IncompleteWindow(f"the triangle across the base of {t.corners} is outside the window")
            missing.append(n)
            continue
        head = w.triangles[nxt[n]].tip
        kind = IN_FURROW if head[0] == t.tip[0] else CROSS_FURROW
        edges.append(SkeletonEdge(t.tip, head, kind, t.ladder, n))
        lad = succ.setdefault(t.ladder, {})
        if t.tip in lad:
            raise StructureViolation(f"vertex {t.tip} is the tip of two triangles in ladder {t.ladder}", t.tip)
        lad[t.tip] = head
    # arcs run towards the apex; paths are stored outwards like the rays of a CTWindow
    paths = {j: [seg[::-1] for seg in _segments(s)] for j, s in sorted(succ.items())}
    verts = {k: v.color for k, v in w.vertices.items()}
    coords = {k: v.coords for k, v in w.vertices.items()}
    return SkeletonGraph("ct", verts, coords, edges, paths, [], missing)


def skeleton_as_window(g: SkeletonGraph) -> CTWindow:
    """Cells of a CT skeleton, read off its ray paths.

    The longest segment of each path stands for the ray; cells need both gates
    on the two rays bounding their furrow.
    """
    if g.flavour != "ct":
        raise ValueError("expected a Cannon-Thurston skeleton")
    rays = {j: max(segs, key=len) for j, segs in g.paths.items() if segs}
    verts = {}

    def add(vid):
        if vid not in verts:
            z = g.coords.get(vid)
            x, y = (None, None) if z is None else z
            verts[vid] = RulingSingularity(vid[0], vid[1], x, y)
        return vid

    for ids in rays.values():
        for vid in ids:
            add(vid)
    cells = {}
    for i in sorted(set(rays) & {j - 1 for j in rays}):
        left_ray, right_ray = rays[i], rays[i + 1]
        lpos = {v: n for n, v in enumerate(left_ray)}
        rpos = {v: n for n, v in enumerate(right_ray)}
        ss = sorted(s for (q, s) in left_ray if q == i)
        for s in ss:
            a, b = (i, s), (i, s + 1)
            if not (a in lpos and b in lpos and a in rpos and b in rpos):
                continue
            left = tuple(left_ray[lpos[b] + 1:lpos[a]])
            right = tuple(right_ray[rpos[a] + 1:rpos[b]])
            if any(v[0] != i - 1 for v in left) or any(v[0] != i + 1 for v in right):
                raise StructureViolation(f"the gates of cell {(i, s)} are not consecutive on their rays", (i, s))
            cells[(i, s)] = CTCell((i, s), (a, b), left, right, furrow_color(i))
    if not cells:
        return CTWindow((0, -1), (0, 0), verts, {}, {j: list(r) for j, r in rays.items()})
    furrows = sorted({k[0] for k in cells})
    pos = sorted({k[1] for k in cells})
    return CTWindow((furrows[0], furrows[-1]), (pos[0], pos[-1] + 1), verts, cells,
                    {j: list(r) for j, r in sorted(rays.items())})


# ---------------------------------------------------------------------------
# CT -> link
# ---------------------------------------------------------------------------

def cell_fan(cell: CTCell) -> list:
    """Edges added inside one cell: the ladderpole edge and the rungs.

    The top gate is gate s in even furrows and gate s + 1 in odd ones.  Blue cells
    turn clockwise, sending the top gate to the right spikes; red cells turn
    counterclockwise, sending it to the left spikes.  Either way gate s meets the
    right spikes and gate s + 1 the left ones.
    """
    a, b = cell.gates
    i = cell.id[0]
    top, bottom = (a, b) if i % 2 == 0 else (b, a)
    clockwise = cell.color == furrow_color(0)
    to_right, to_left = (top, bottom) if clockwise else (bottom, top)
    out = [(a, b, POLE)]
    out += [(to_right, u, RUNG) for u in cell.right]
    out += [(to_left, u, RUNG) for u in cell.left]
    return out


def ct_to_agol(w: CTWindow, strict: bool = False) -> SkeletonGraph:
    """Link 1-skeleton from a CT window: its edges, the fans, duplicates merged."""
    raw = []
    for j, u, v, kind in w.edges():
        raw.append((u, v, POLE if kind == IN_FURROW else RUNG, j))
    faces, missing = [], []
    for key, cell in sorted(w.cells.items()):
        if not cell.complete:
            if strict:
                raise IncompleteWindow(f"cell {key} is cut by the window")
            missing.append(key)
            continue
        faces.append(cell.boundary())
        for u, v, kind in cell_fan(cell):
            raw.append((u, v, kind, None))
    # parallel copies bound no spike: keep one per endpoint pair
    seen, edges = set(), []
    for u, v, kind, j in raw:
        ends = _pair(u, v)
        if ends in seen:
            continue
        seen.add(ends)
        if (kind == POLE) != (u[0] == v[0]):
            raise StructureViolation(f"edge {ends} has the wrong type", ends)
        edges.append(SkeletonEdge(ends[0], ends[1], kind, j))
    verts, coords = {}, {}
    for k, p in w.vertices.items():
        verts[k] = "R" if k[0] % 2 == 0 else "B"
        coords[k] = None if p.x is None else (p.x, p.y)
    return SkeletonGraph("agol", verts, coords, edges, {}, faces, missing)


def link_skeleton(w: LinkWindow) -> SkeletonGraph:
    """The ladderpole edges and rungs of a link window."""
    edges = [SkeletonEdge(a, b, POLE, None) for a, b in w.pole_edges()]
    edges += [SkeletonEdge(a, b, RUNG, None) for a, b in w.rungs()]
    verts = {k: v.color for k, v in w.vertices.items()}
    coords = {k: v.coords for k, v in w.vertices.items()}
    faces = [t.corners for t in w.triangles]
    return SkeletonGraph("agol", verts, coords, edges, {}, faces, [])


def skeleton_as_link(g: SkeletonGraph) -> LinkWindow:
    """Triangles of a link skeleton, rebuilt ladder by ladder from consecutive rungs.

    Tips follow the drawing convention: on the right pole the end nearer s
    minus infinity, on the left pole the end nearer s plus infinity.  Hinge
    flags and tetrahedra are not recoverable and are left unset.
    """
    if g.flavour != "agol":
        raise ValueError("expected a link skeleton")
    poles = sorted({k[0] for k in g.vertices})
    rungs: dict = {}
    for e in g.edges:
        if e.kind != RUNG:
            continue
        a, b = e.ends
        if b[0] != a[0] + 1:
            raise StructureViolation(f"rung {e.ends} skips a pole", e.ends)
        rungs.setdefault(b[0], []).append((a, b))
    pole_edges = {e.ends for e in g.edges if e.kind == POLE}
    triangles = []
    for j, rs in sorted(rungs.items()):
        rs.sort(key=lambda r: (_eps(j - 1) * r[0][1], _eps(j) * r[1][1]))
        for (a1, b1), (a2, b2) in zip(rs, rs[1:]):
            if a1 == a2 and _pair(b1, b2) in pole_edges:
                edge, third, side = tuple(sorted((b1, b2))), a1, "R"
                tip = edge[0]
            elif b1 == b2 and _pair(a1, a2) in pole_edges:
                edge, third, side = tuple(sorted((a1, a2))), b1, "L"
                tip = edge[1]
            else:
                continue
            eps = _eps(edge[0][0])
            tail, head = (edge[1], edge[0]) if eps < 0 else edge
            corners = (tail, third, head) if side == "L" else (tail, head, third)
            triangles.append(WindowTriangle(j, corners, (tail, head), third, tip, side, None, None, None, None))
    verts = {k: LinkVertex(k, col, None, g.coords.get(k)) for k, col in g.vertices.items()}
    ss = sorted({k[1] for k in g.vertices}) or [0]
    triangles.sort(key=lambda t: (t.ladder, sorted(t.corners)))
    return LinkWindow((poles[0], poles[-1]) if poles else (0, -1), (ss[0], ss[-1] + 1), verts, triangles,
                      0, {}, any(z is not None for z in g.coords.values()))


# ---------------------------------------------------------------------------
# the dictionary check
# ---------------------------------------------------------------------------

@dataclass
class DictionaryReport:
    ok: bool
    counts: dict                    # row -> size of the checked bijection
    row: Optional[str] = None       # first failing row
    witness: object = None
    message: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "counts": dict(sorted(self.counts.items())), "row": self.row,
                "witness": None if self.witness is None else repr(self.witness), "message": self.message}


def align(link: LinkWindow, ct: CTWindow) -> dict:
    """CT vertex id -> link vertex id, by coordinates when both sides have them."""
    geo = link.geometric and all(p.x is not None for p in ct.vertices.values())
    if not geo:
        missing = [k for k in ct.vertices if k not in link.vertices]
        if missing:
            raise IncompatibleWindows(f"vertex {missing[0]} of the tessellation is not in the link window")
        return {k: k for k in ct.vertices}
    where = {(k[0], P.key(v.coords)): k for k, v in link.vertices.items()}
    out = {}
    for k, p in ct.vertices.items():
        hit = where.get((k[0], P.key((p.x, p.y))))
        if hit is None:
            raise IncompatibleWindows(f"no link vertex of pole {k[0]} sits at the coordinates of {k}")
        out[k] = hit
    return out


def ladder_frame(j: int, vid: tuple, coords) -> tuple:
    """Coordinates with the ray j pointing up and quadrant j to its right."""
    x, y = coords
    return (x, y) if vid[0] == j else (-y, x)


def classify_by_coordinates(j: int, corners: dict) -> str:
    """Hinge or NonHinge from the positions of a triangle's corners in ladder j.

    ``corners`` maps vertex ids to quadrant coordinates.  The three corners
    are the singularities on the sides of a rectangle whose bottom side holds
    the apex; call T the highest.  The triangle is non-hinge when T is on the same
    side of the ray as the middle corner and hinge when it is on the side of the
    lowest one.
    """
    pts = {v: ladder_frame(j, v, z) for v, z in corners.items()}
    order = sorted(pts, key=lambda v: pts[v][1])
    low, mid, top = order
    if not pts[low][1] < pts[mid][1] < pts[top][1]:
        raise StructureViolation("two corners at the same height", order)
    side = {v: pts[v][0] < 0 for v in pts}
    return "NonHinge" if side[top] == side[mid] else "Hinge"


def _fail(counts, row, witness, message) -> DictionaryReport:
    return DictionaryReport(False, counts, row, witness, message)


def verify_dictionary(link: LinkWindow, ct: CTWindow) -> DictionaryReport:
    """Check the five rows of the dictionary on the windows' common interior.

    Rows: vertices, furrows and ladderpoles, cells and ladderpole edges,
    spikes and rungs, in-furrow and cross-furrow edges against non-hinge and
    hinge triangles.  Vertex ids of ``ct`` may be shifted per quadrant.
    """
    a, b = ct.quadrants
    if not (link.poles[0] <= a - 1 and b + 1 <= link.poles[1]):
        raise IncompatibleWindows(f"poles {link.poles} do not cover quadrants {a - 1}..{b + 1}")
    m = align(link, ct)
    counts: dict = {}
    full = link.full_vertices()

    # vertices
    for k, lk in m.items():
        if link.vertices[lk].color != ("R" if k[0] % 2 == 0 else "B"):
            return _fail(counts, "vertices", k, "colour differs from the pole")
    counts["vertices"] = len(m)

    # furrows and ladderpoles
    for i in range(a, b + 1):
        pole = [v for k, v in link.vertices.items() if k[0] == i]
        if not pole:
            return _fail(counts, "furrows", i, "no ladderpole for the furrow")
        if pole[0].color == furrow_color(i):
            return _fail(counts, "furrows", i, "ladderpole edges and furrow differ in colour")
    counts["furrows"] = b - a + 1

    # cells and ladderpole edges, spikes and rungs
    pole_edges = set(link.pole_edges())
    rungs = set(link.rungs())
    used_pole, used_rung = set(), set()
    for key, cell in sorted(ct.cells.items()):
        if not cell.complete:
            continue
        ga, gb = m[cell.gates[0]], m[cell.gates[1]]
        pe = _pair(ga, gb)
        if pe not in pole_edges:
            return _fail(counts, "cells", key, f"gates {pe} are not joined by a ladderpole edge")
        used_pole.add(pe)
        for u in cell.left:
            r = _pair(m[u], gb)
            if r not in rungs:
                return _fail(counts, "spikes", (key, u), f"no rung {r}")
            used_rung.add(r)
        for u in cell.right:
            r = _pair(m[u], ga)
            if r not in rungs:
                return _fail(counts, "spikes", (key, u), f"no rung {r}")
            used_rung.add(r)
    # conversely every interior pole edge of a furrow and every interior rung is met
    for pe in pole_edges:
        if a <= pe[0][0] <= b and pe[0] in full and pe[1] in full and _inside(ct, m, pe) and pe not in used_pole:
            return _fail(counts, "cells", pe, "ladderpole edge without a cell")
    for r in rungs:
        if r[0] in full and r[1] in full and _rung_inside(ct, m, r) and r not in used_rung:
            return _fail(counts, "spikes", r, "rung without a spike")
    counts["cells"] = len(used_pole)
    counts["spikes"] = len(used_rung)

    # edges and triangles
    back = {v: k for k, v in m.items()}
    arcs = agol_to_ct(link)
    arc_of = {(e.ladder, e.ends): e for e in arcs.edges}
    n_in = n_cross = 0
    for j, u, v, kind in ct.edges():
        key = (j, _pair(m[u], m[v]))
        e = arc_of.get(key)
        if e is None:
            if m[u] in full and m[v] in full:
                return _fail(counts, "edges", (j, u, v), "no tip-to-tip arc for this edge")
            continue
        t = link.triangles[e.source]
        if (kind == CROSS_FURROW) != bool(t.hinge):
            return _fail(counts, "edges", (j, u, v), f"{kind} edge from a {'hinge' if t.hinge else 'non-hinge'} triangle")
        n_in += kind == IN_FURROW
        n_cross += kind == CROSS_FURROW
    on_ray = {j: set(ids) for j, ids in ct.rays.items()}
    ct_keys = {(j, _pair(u, v)) for j, u, v, _ in ct.edges()}
    for e in arcs.edges:
        ends = [back.get(x) for x in e.ends]
        if None in ends or not all(x in on_ray.get(e.ladder, ()) for x in ends):
            continue
        if (e.ladder, _pair(*ends)) not in ct_keys:
            return _fail(counts, "edges", e, "arc missing from the tessellation")
    counts["in_furrow"] = n_in
    counts["cross_furrow"] = n_cross

    # classification from coordinates, on the triangles met by the window
    if link.geometric:
        seen = 0
        for t in link.triangles:
            if not (a <= t.ladder <= b + 1) or t.hinge is None:
                continue
            got = classify_by_coordinates(t.ladder, {v: link.vertices[v].coords for v in t.corners})
            if (got == "Hinge") != t.hinge:
                return _fail(counts, "classification", t.corners, f"coordinates say {got}")
            seen += 1
        counts["classified"] = seen
    return DictionaryReport(True, counts)


def _coord_span(ct: CTWindow, m: dict, i: int):
    """Range of link positions covered by the cells of furrow i."""
    ss = [m[g][1] for c in ct.cells.values() if c.id[0] == i and c.complete for g in c.gates]
    return (min(ss), max(ss)) if ss else None


def _inside(ct: CTWindow, m: dict, pe: tuple) -> bool:
    span = _coord_span(ct, m, pe[0][0])
    return span is not None and span[0] <= pe[0][1] and pe[1][1] <= span[1]


def _rung_inside(ct: CTWindow, m: dict, r: tuple) -> bool:
    # a rung between poles i - 1 and i is a spike of a cell in furrow i - 1 or i
    (p, s), (q, t) = r
    for i, g in ((p, s), (q, t)):
        if ct.quadrants[0] <= i <= ct.quadrants[1]:
            span = _coord_span(ct, m, i)
            if span is None or not span[0] < g < span[1]:
                return False
        else:
            return False
    return True


def matched_windows(surface, veering, quadrants=(0, 2), depth=6, cusp: int = 0, margin: int = 3, **kw):
    """A CT window and a link window covering it, for the same bundle."""
    from .ct_tess import ct_window
    from .cusp_link import cusp_triangulation
    ct = ct_window(surface, quadrants, depth, **kw)
    ss = [k[1] for k in ct.vertices] or [0]
    a, b = ct.quadrants
    link = unroll(cusp_triangulation(veering, cusp), (a - 1, b + 1), (min(ss) - margin, max(ss) + margin + 1))
    return link, ct


# ---------------------------------------------------------------------------
# round trips
# ---------------------------------------------------------------------------

def link_interior(w: LinkWindow) -> set:
    """Vertices whose star and whose neighbours' stars lie in the window."""
    full = w.full_vertices()
    near: dict = {}
    for a, b in w.pole_edges() + w.rungs():
        near.setdefault(a, set()).add(b)
        near.setdefault(b, set()).add(a)
    return {v for v in full if near.get(v, set()) <= full}


def ct_interior(w: CTWindow) -> set:
    """Gates with a complete cell on either side of them in their furrow."""
    out = set()
    for (i, s), cell in w.cells.items():
        prev = w.cells.get((i, s - 1))
        if cell.complete and prev is not None and prev.complete:
            out.add((i, s))
    return out


def _flanked(w: CTWindow, j: int, ends: tuple, keep: set) -> bool:
    """Both ends are interior gates and lie between interior gates of the other family on ray j."""
    if not (ends[0] in keep and ends[1] in keep):
        return False
    ray = w.rays[j]
    pos = {v: n for n, v in enumerate(ray)}
    for u in ends:
        other = [pos[v] for v in ray if v[0] != u[0] and v in keep]
        if not other or not min(other) < pos[u] < max(other):
            return False
    return True


@dataclass
class RoundTrip:
    compared: int           # original interior edges
    missing: list           # interior edges not reproduced
    extra: list             # reproduced edges absent from the original

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra


def round_trip_link(w: LinkWindow) -> RoundTrip:
    """Link skeleton through the tessellation and back."""
    before = link_skeleton(w).edge_set()
    after = ct_to_agol(skeleton_as_window(agol_to_ct(w))).edge_set()
    keep = link_interior(w)
    inner = sorted(e for e in before if e[0] in keep and e[1] in keep)
    return RoundTrip(len(inner), [e for e in inner if e not in after], sorted(after - before))


def round_trip_ct(w: CTWindow) -> RoundTrip:
    """Tessellation skeleton through the link and back, ray by ray."""
    before = {(j, _pair(u, v)) for j, u, v, _ in w.edges()}
    after = {(e.ladder, e.ends) for e in agol_to_ct(skeleton_as_link(ct_to_agol(w))).edges}
    keep = ct_interior(w)
    a, b = w.quadrants
    inner = sorted(k for k in before if a < k[0] <= b and _flanked(w, k[0], k[1], keep))
    return RoundTrip(len(inner), [k for k in inner if k not in after], sorted(after - before))
