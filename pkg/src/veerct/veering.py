"""Ideal triangulations with taut angles and veering edge colours.

Tetrahedron vertices are 0..3 and face f is the face opposite vertex f.  A face
gluing is a permutation ``perm`` of {0, 1, 2, 3}: vertex i of the first
tetrahedron goes to vertex ``perm[i]`` of the second, so face f is glued to face
``perm[f]``.  Every tetrahedron is taken to be positively oriented, which makes
the manifold oriented exactly when every gluing permutation is odd.

The veering model tetrahedron has its vertices labelled L, B, R, T (0, 1, 2, 3),
sitting at the left, bottom, right and top of a rhombus seen from above.  The
edges LR (below) and BT (above) carry the angle pi.  Side edges of positive
slope (BR and TL) are red and those of negative slope (LB and RT) are blue.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Optional

EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
# the three pairs of opposite edges, as indices into EDGES
OPPOSITE = ((0, 5), (1, 4), (2, 3))
RED, BLUE = "R", "B"

_SIDE_COLOURS = {(0, 1): BLUE, (2, 3): BLUE, (1, 2): RED, (0, 3): RED}


class TopologyError(ValueError):
    pass


class TooLarge(ValueError):
    pass


def perm_sign(p) -> int:
    s = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def perm_inverse(p) -> tuple:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def edge_index(a: int, b: int) -> int:
    return EDGES.index((a, b) if a < b else (b, a))


# ---------------------------------------------------------------------------
# triangulations
# ---------------------------------------------------------------------------

@dataclass
class IdealTriangulation:
    n_tets: int
    gluings: dict                      # (tet, face) -> (tet', perm)
    edge_classes: list = field(init=False)
    edge_class: dict = field(init=False)

    def __post_init__(self):
        self.gluings = {(int(t), int(f)): (int(t2), tuple(p)) for (t, f), (t2, p) in self.gluings.items()}
        for t in range(self.n_tets):
            for f in range(4):
                if (t, f) not in self.gluings:
                    raise TopologyError(f"face {f} of tetrahedron {t} is unglued")
        for (t, f), (t2, p) in self.gluings.items():
            if sorted(p) != [0, 1, 2, 3]:
                raise TopologyError(f"gluing of ({t}, {f}) is not a permutation")
            back = self.gluings.get((t2, p[f]))
            if back != (t, perm_inverse(p)):
                raise TopologyError(f"gluing of ({t}, {f}) is not an involution")
            if (t2, p[f]) == (t, f):
                raise TopologyError(f"face {f} of tetrahedron {t} is glued to itself")
            if perm_sign(p) != -1:
                raise TopologyError(f"gluing of ({t}, {f}) preserves orientation")
        self._edge_classes()

    def _edge_classes(self):
        parent = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for t in range(self.n_tets):
            for e in range(6):
                find((t, e))
        for (t, f), (t2, p) in self.gluings.items():
            for a, b in EDGES:
                if f in (a, b):
                    continue
                x, y = find((t, edge_index(a, b))), find((t2, edge_index(p[a], p[b])))
                if x != y:
                    parent[max(x, y)] = min(x, y)
        classes: dict = {}
        for t in range(self.n_tets):
            for e in range(6):
                classes.setdefault(find((t, e)), []).append((t, e))
        self.edge_classes = sorted(classes.values())
        self.edge_class = {m: i for i, c in enumerate(self.edge_classes) for m in c}

    def degree(self, c: int) -> int:
        return len(self.edge_classes[c])

    def n_edges(self) -> int:
        return len(self.edge_classes)

    def to_json(self) -> dict:
        return {"tetrahedra": self.n_tets,
                "gluings": [{"tet": t, "face": f, "to": t2, "perm": list(p)}
                            for (t, f), (t2, p) in sorted(self.gluings.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "IdealTriangulation":
        g = {(e["tet"], e["face"]): (e["to"], tuple(e["perm"])) for e in data["gluings"]}
        return cls(int(data["tetrahedra"]), g)


@dataclass
class TautAngles:
    """The two edges (indices into EDGES) carrying angle pi, per tetrahedron.

    Pairs are ordered (lower, upper).  The order carries the coorientation: the
    faces opposite the endpoints of the lower edge are the top faces.
    """
    pi_edges: list

    @classmethod
    def from_pairs(cls, pairs) -> "TautAngles":
        return cls([OPPOSITE[k] for k in pairs])


@dataclass
class EdgeColoring:
    colors: list                       # per edge class: RED or BLUE


@dataclass
class VeeringTriangulation:
    tri: IdealTriangulation
    taut: TautAngles
    colors: EdgeColoring
    provenance: Optional[dict] = None

    def color_of(self, tet: int, e: int) -> str:
        return self.colors.colors[self.tri.edge_class[(tet, e)]]

    def to_json(self) -> dict:
        d = self.tri.to_json()
        d["pi"] = [list(p) for p in self.taut.pi_edges]
        d["colors"] = list(self.colors.colors)
        d["edge_classes"] = [[list(m) for m in c] for c in self.tri.edge_classes]
        return d

    @classmethod
    def from_json(cls, data: dict) -> "VeeringTriangulation":
        tri = IdealTriangulation.from_json(data)
        return cls(tri, TautAngles([tuple(p) for p in data["pi"]]), EdgeColoring(list(data["colors"])))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ok:
    pass


@dataclass(frozen=True)
class TetViolation:
    tet: int
    reason: str


@dataclass(frozen=True)
class EdgeViolation:
    edge_class: int
    pi_count: int


def validate_taut(t: IdealTriangulation, a: TautAngles):
    """Each tetrahedron has one opposite pair at pi; each edge class sees exactly two pi's."""
    if len(a.pi_edges) != t.n_tets:
        return TetViolation(-1, "angle data does not match the tetrahedra")
    for tet, pair in enumerate(a.pi_edges):
        if tuple(sorted(pair)) not in OPPOSITE:
            return TetViolation(tet, f"pi edges {tuple(pair)} are not opposite")
    for c, members in enumerate(t.edge_classes):
        n = sum(1 for tet, e in members if e in a.pi_edges[tet])
        if n != 2:
            return EdgeViolation(c, n)
    return Ok()


def model_labelling(pi_pair) -> tuple:
    """An orientation-preserving map from tetrahedron vertices to (L, B, R, T).

    Returns ``lab`` with lab[v] the model label of vertex v.  Every such map that
    sends the pi edges to LR and BT imposes the same colour pattern on the sides.
    """
    (a, b), (c, d) = EDGES[pi_pair[0]], EDGES[pi_pair[1]]
    lab = [0] * 4
    lab[a], lab[b], lab[c], lab[d] = 0, 2, 1, 3
    if perm_sign(lab) < 0:
        lab[c], lab[d] = 3, 1
    return tuple(lab)


def side_pattern(pi_pair) -> dict:
    """Required colour for each side edge (index into EDGES) of a veering tetrahedron."""
    lab = model_labelling(pi_pair)
    out = {}
    for e, (u, v) in enumerate(EDGES):
        if e in pi_pair:
            continue
        key = tuple(sorted((lab[u], lab[v])))
        out[e] = _SIDE_COLOURS[key]
    return out


def validate_veering(v: VeeringTriangulation):
    """Match every tetrahedron with the model; Ok or the first failing tetrahedron."""
    taut = validate_taut(v.tri, v.taut)
    if not isinstance(taut, Ok):
        return taut
    if len(v.colors.colors) != v.tri.n_edges():
        return TetViolation(-1, "colour data does not match the edge classes")
    for tet in range(v.tri.n_tets):
        for e, want in side_pattern(v.taut.pi_edges[tet]).items():
            if v.color_of(tet, e) != want:
                return TetViolation(tet, f"side edge {EDGES[e]} is {v.color_of(tet, e)}, model wants {want}")
    return validate_coorientation(v.tri, v.taut)


def top_faces(pi_pair) -> tuple:
    return EDGES[pi_pair[0]]


def validate_coorientation(t: IdealTriangulation, a: TautAngles):
    """Every top face must be glued to a bottom face."""
    for (tet, f), (t2, p) in sorted(t.gluings.items()):
        up = f in top_faces(a.pi_edges[tet])
        up2 = p[f] in top_faces(a.pi_edges[t2])
        if up == up2:
            side = "top" if up else "bottom"
            return TetViolation(tet, f"{side} face {f} is glued to a {side} face of tetrahedron {t2}")
    return Ok()


def classify_tetrahedron(v: VeeringTriangulation, tet: int) -> str:
    a, b = v.taut.pi_edges[tet]
    return "Hinge" if v.color_of(tet, a) != v.color_of(tet, b) else "NonHinge"


# ---------------------------------------------------------------------------
# canonical encoding
# ---------------------------------------------------------------------------

MAX_ENCODE = 16


def canonical_encode(v: VeeringTriangulation) -> str:
    """Lexicographically least serialisation over all relabellings.

    Grammar::

        code  := "VT1:" n ":" tet (";" tet)*
        tet   := glue "," glue "," glue "," glue "|" pi "|" colours
        glue  := index "." perm          (perm: four digits)
        pi    := "0" | "1" | "2"         (opposite pair, see OPPOSITE)
        colours := six characters R/B, edges in EDGES order

    Tetrahedra are numbered in order of discovery by a breadth-first walk that
    visits faces 0..3; the walk starts at every (tetrahedron, labelling) pair.
    """
    t = v.tri
    n = t.n_tets
    if n > MAX_ENCODE:
        raise TooLarge(f"{n} tetrahedra exceed the limit of {MAX_ENCODE}")
    best = None
    for start in range(n):
        for sigma in permutations(range(4)):
            code = _encode_from(v, start, sigma)
            if code is not None and (best is None or code < best):
                best = code
    return best


def _encode_from(v: VeeringTriangulation, start: int, sigma) -> Optional[str]:
    """Walk from ``start`` where old vertex i is renamed sigma[i]."""
    t = v.tri
    order = [start]
    new_index = {start: 0}
    relabel = {start: tuple(sigma)}
    parts = []
    i = 0
    while i < len(order):
        tet = order[i]
        s = relabel[tet]
        inv = perm_inverse(s)
        glues = []
        for f_new in range(4):
            f_old = inv[f_new]
            t2, p = t.gluings[(tet, f_old)]
            if t2 not in new_index:
                # the neighbour's vertices take the names of the vertices glued to them
                s2 = [0] * 4
                for a in range(4):
                    s2[p[a]] = s[a]
                new_index[t2] = len(order)
                order.append(t2)
                relabel[t2] = tuple(s2)
            s2 = relabel[t2]
            perm_new = tuple(s2[p[inv[a]]] for a in range(4))
            glues.append(f"{new_index[t2]}.{''.join(map(str, perm_new))}")
        pi = v.taut.pi_edges[tet]
        e_new = [edge_index(s[EDGES[e][0]], s[EDGES[e][1]]) for e in pi]
        pair = OPPOSITE.index(tuple(sorted(e_new)))
        cols = [""] * 6
        for e, (a, b) in enumerate(EDGES):
            cols[edge_index(s[a], s[b])] = v.color_of(tet, e)
        parts.append(",".join(glues) + f"|{pair}|" + "".join(cols))
        i += 1
    if len(order) != t.n_tets:
        return None
    return f"VT1:{t.n_tets}:" + ";".join(parts)
