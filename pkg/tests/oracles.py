"""Brute-force reference computations on lattice tori, used only by the tests."""
from itertools import combinations
from math import gcd

from veerct import planar as P


def lattice_basis(surface):
    return surface.triangles[0][1], surface.triangles[1][2]


def lattice_window(surface, radius):
    u, v = lattice_basis(surface)
    pts = []
    for m in range(-radius, radius + 1):
        for n in range(-radius, radius + 1):
            pts.append(P.add(P.scale(m, u), P.scale(n, v)))
    return pts


def _squares_through(p, q, r, rho):
    """Candidate rho-squares with p, q on opposite sides and r on a third side."""
    out = []
    for a, b, c in ((p, q, r), (q, p, r), (p, r, q), (r, p, q), (q, r, p), (r, q, p)):
        # a on left, b on right
        w = b[0] - a[0]
        if w.sign() > 0:
            h = w * rho
            for top in (True, False):
                y0 = c[1] - h if top else c[1]
                out.append(((a[0], y0), w, h))
        # a on bottom, b on top
        h = b[1] - a[1]
        if h.sign() > 0:
            w = h / rho
            for right in (True, False):
                x0 = c[0] - w if right else c[0]
                out.append(((x0, a[1]), w, h))
    return out


def _on_boundary(p, sq):
    (x0, y0), w, h = sq
    x1, y1 = x0 + w, y0 + h
    inside = x0 <= p[0] <= x1 and y0 <= p[1] <= y1
    return inside and (p[0] == x0 or p[0] == x1 or p[1] == y0 or p[1] == y1)


def _strictly_inside(p, sq):
    (x0, y0), w, h = sq
    return x0 < p[0] < x0 + w and y0 < p[1] < y0 + h


def lattice_delaunay_triangles(surface, rho, radius=3, window=8):
    """Delaunay triangles of a one-vertex torus, as sets of vertex offsets from the centroid."""
    near = [p for p in lattice_window(surface, radius)]
    far = lattice_window(surface, window)
    zero = surface.field.zero()
    origin = (zero, zero)
    found = set()
    others = [p for p in near if P.key(p) != P.key(origin)]
    for q, r in combinations(others, 2):
        tri = (origin, q, r)
        if P.orient(*tri) == 0:
            continue
        for sq in _squares_through(origin, q, r, rho):
            if not all(_on_boundary(x, sq) for x in tri):
                continue
            if any(_strictly_inside(x, sq) for x in far):
                continue
            c = P.centroid(list(tri))
            found.add(frozenset(P.key(P.sub(x, c)) for x in tri))
    return found


def primitive_in_box(surface, box_fn, radius=25):
    u, v = lattice_basis(surface)
    out = set()
    for m in range(-radius, radius + 1):
        for n in range(-radius, radius + 1):
            if gcd(m, n) != 1:
                continue
            w = P.add(P.scale(m, u), P.scale(n, v))
            z = box_fn(w)
            if z is not None:
                out.add(P.key(z))
    return out


def staircase_bruteforce(surface, to_quad, budget, radius=30):
    """Pareto-minimal lattice points of a quadrant whose rectangle from 0 is empty."""
    pts = []
    for w in lattice_window(surface, radius):
        z = to_quad(w)
        if z[0].sign() > 0 and z[1].sign() > 0 and z[0] <= budget and z[1] <= budget:
            pts.append(z)
    stair = []
    for z in pts:
        if not any(o[0] < z[0] and o[1] < z[1] for o in pts):
            # rectangle (0, x) x (0, y) must be empty; points on its boundary other
            # than z would be axis connections, absent for eigen-tori
            stair.append(z)
    stair.sort(key=lambda z: P.fl(z[0]))
    return stair


def _lattice_box(surface, xmax, ymax):
    """Float coordinates of all lattice points in [-xmax, xmax] x [-ymax, ymax]."""
    import math
    u, v = lattice_basis(surface)
    u = (float(u[0]), float(u[1]))
    v = (float(v[0]), float(v[1]))
    det = u[0] * v[1] - u[1] * v[0]
    # coordinates (m, n) of box corners bound the search range
    ms, ns = [], []
    for x in (-xmax, xmax):
        for y in (-ymax, ymax):
            ms.append((x * v[1] - y * v[0]) / det)
            ns.append((u[0] * y - u[1] * x) / det)
    pts = []
    for m in range(math.floor(min(ms)) - 1, math.ceil(max(ms)) + 2):
        for n in range(math.floor(min(ns)) - 1, math.ceil(max(ns)) + 2):
            x, y = m * u[0] + n * v[0], m * u[1] + n * v[1]
            if abs(x) <= xmax and abs(y) <= ymax:
                pts.append((x, y))
    return pts


def count_max_rectangles(surface, lo, hi, area_factor=8.0):
    """Maximal empty rectangles of a one-vertex torus with aspect in (lo, hi].

    Each rectangle is counted once up to translation by putting its left point at
    the origin.  Such a rectangle is fixed by its right point q: its bottom and
    top points are the nearest lattice points below and above 0 in the strip
    0 < x < q_x.  Empty rectangles in these lattices have area below a few times
    the covolume, which bounds the window.
    """
    import math
    area = float(surface.area())
    k = area_factor * area
    xmax = math.sqrt(k / lo)
    ymax = math.sqrt(k * hi)
    pts = _lattice_box(surface, xmax + 1, ymax + 1)
    count = 0
    for qx, qy in pts:
        if qx <= 0 or qx > xmax:
            continue
        below = [y for x, y in pts if 0 < x < qx and y < 0]
        above = [y for x, y in pts if 0 < x < qx and y > 0]
        if not below or not above:
            continue
        b, t = max(below), min(above)
        if b < qy < t and lo < (t - b) / qx <= hi:
            count += 1
    return count


def farey_count(m):
    """Letters in the cyclic R/L word of a positive hyperbolic matrix.

    Uses the periodic continued fraction of the expanding eigen-slope: the period
    (taken with even length) lists the exponents of the word, and the matrix may
    be a power of the word read off one period.
    """
    import math
    (a, b), (c, d) = m
    tr = a + d
    D = tr * tr - 4
    r = math.isqrt(D)
    Pn, Qn = a - d, 2 * c
    seen = {}
    quotients = []
    while (Pn, Qn) not in seen:
        seen[(Pn, Qn)] = len(quotients)
        # floor((P + sqrt D) / Q), exact since sqrt D is irrational
        q = (Pn + r) // Qn if Qn > 0 else (Pn + r + 1) // Qn
        quotients.append(q)
        Pn = q * Qn - Pn
        Qn = (D - Pn * Pn) // Qn
    period = quotients[seen[(Pn, Qn)]:]
    if len(period) % 2:
        period = period * 2
    # trace of the word for one period
    M = [[1, 0], [0, 1]]
    for i, e in enumerate(period):
        step = [[1, e], [0, 1]] if i % 2 == 0 else [[1, 0], [e, 1]]
        M = [[M[0][0] * step[0][0] + M[0][1] * step[1][0], M[0][0] * step[0][1] + M[0][1] * step[1][1]],
             [M[1][0] * step[0][0] + M[1][1] * step[1][0], M[1][0] * step[0][1] + M[1][1] * step[1][1]]]
    lam_p = (M[0][0] + M[1][1] + math.sqrt((M[0][0] + M[1][1]) ** 2 - 4)) / 2
    lam = (tr + math.sqrt(D)) / 2
    power = round(math.log(lam) / math.log(lam_p))
    return power * sum(period)


def _lattice_rect(surface, x0, x1, y0, y1):
    """Float coordinates of the lattice points in the closed plane box [x0, x1] x [y0, y1]."""
    import math
    u, v = lattice_basis(surface)
    u = (float(u[0]), float(u[1]))
    v = (float(v[0]), float(v[1]))
    det = u[0] * v[1] - u[1] * v[0]
    ms, ns = [], []
    for x in (x0, x1):
        for y in (y0, y1):
            ms.append((x * v[1] - y * v[0]) / det)
            ns.append((u[0] * y - u[1] * x) / det)
    pts = []
    for m in range(math.floor(min(ms)) - 1, math.ceil(max(ms)) + 2):
        for n in range(math.floor(min(ns)) - 1, math.ceil(max(ns)) + 2):
            x, y = m * u[0] + n * v[0], m * u[1] + n * v[1]
            if x0 <= x <= x1 and y0 <= y <= y1:
                pts.append((x, y))
    return pts


def _quadrant_points(surface, q, xmax, ymax):
    """Lattice points with quadrant-q coordinates in (0, xmax] x (0, ymax], as floats."""
    from veerct.flat_surface import from_quadrant_coords, to_quadrant_coords
    corners = [from_quadrant_coords(q, (a, b)) for a in (0.0, xmax) for b in (0.0, ymax)]
    xs, ys = [c[0] for c in corners], [c[1] for c in corners]
    pts = [to_quadrant_coords(q, w) for w in _lattice_rect(surface, min(xs), max(xs), min(ys), max(ys))]
    return [z for z in pts if 0 < z[0] <= xmax and 0 < z[1] <= ymax]


def stairs_between(surface, q, lo, hi, along_y=False):
    """Pareto-minimal lattice points of quadrant q with x (or y) strictly between lo and hi.

    A point is Pareto-minimal when the open rectangle spanned by it and the
    origin holds no lattice point.  Every such point with x > lo lies below the
    lowest lattice point with 0 < x <= lo, which bounds the search box.
    """
    flip = (lambda z: (z[1], z[0])) if along_y else (lambda z: z)

    def box(a, b):
        xm, ym = (b, a) if along_y else (a, b)
        return [flip(z) for z in _quadrant_points(surface, q, xm, ym)]

    cap = 1.0 + float(surface.area()) / lo
    while True:
        near = [z for z in box(lo, cap)]
        if near:
            ceiling = min(z[1] for z in near)
            break
        cap *= 2
    pts = sorted((z for z in box(hi, ceiling) if z[0] < hi), key=lambda z: z[0])
    out, lowest = [], float("inf")
    for z in pts:
        if z[1] < lowest:
            if z[0] > lo:
                out.append(flip(z))
            lowest = z[1]
    return out


def spike_oracle(surface, i, gates):
    """Spikes of the cell of furrow i with the given gate coordinates, by rectangle emptiness.

    Left spikes are staircase points of quadrant i - 1 strictly between the gates
    in x, right spikes those of quadrant i + 1 strictly between them in y.
    """
    (xs, ys), (xt, yt) = [(P.fl(x), P.fl(y)) for x, y in gates]
    left = stairs_between(surface, i - 1, yt, ys)
    right = stairs_between(surface, i + 1, xs, xt, along_y=True)
    return len(left), len(right)
