"""Small exact plane-geometry helpers on pairs of field elements."""
from __future__ import annotations

from typing import Sequence, Tuple

Vec = Tuple  # (x, y) with AlgebraicReal (or rational) entries


def add(p, q):
    return (p[0] + q[0], p[1] + q[1])


def sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def neg(p):
    return (-p[0], -p[1])


def scale(c, p):
    return (p[0] * c, p[1] * c)


def signed(s: int, p):
    return p if s > 0 else (-p[0], -p[1])


def cross(p, q):
    return p[0] * q[1] - p[1] * q[0]


def orient(a, b, c) -> int:
    """+1 if a, b, c turn counterclockwise, -1 clockwise, 0 collinear."""
    return _sgn(cross(sub(b, a), sub(c, a)))


def _sgn(v) -> int:
    if hasattr(v, "sign"):
        return v.sign()
    return (v > 0) - (v < 0)


def sgn(v) -> int:
    return _sgn(v)


def fl(v) -> float:
    """Cheap float value of a field element or rational."""
    return v.approx() if hasattr(v, "approx") else float(v)


def midpoint(p, q):
    return ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


def centroid(points: Sequence):
    n = len(points)
    sx = points[0][0]
    sy = points[0][1]
    for p in points[1:]:
        sx = sx + p[0]
        sy = sy + p[1]
    return (sx / n, sy / n)


def area2(points: Sequence):
    """Twice the signed area of a polygon."""
    total = None
    n = len(points)
    for i in range(n):
        term = cross(points[i], points[(i + 1) % n])
        total = term if total is None else total + term
    return total


def in_closed_triangle(p, a, b, c) -> bool:
    return orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0


def ccw_later(u, v):
    """Of two directions less than pi apart, the one further counterclockwise."""
    return v if _sgn(cross(u, v)) > 0 else u


def ccw_earlier(u, v):
    return u if _sgn(cross(u, v)) > 0 else v


def strictly_inside_wedge(d, a, b) -> bool:
    """Direction d strictly inside the counterclockwise wedge from a to b (< pi)."""
    return _sgn(cross(a, d)) > 0 and _sgn(cross(d, b)) > 0


def in_closed_wedge(d, a, b) -> bool:
    ca = _sgn(cross(a, d))
    cb = _sgn(cross(d, b))
    if ca < 0 or cb < 0:
        return False
    if ca == 0 and _sgn(a[0] * d[0] + a[1] * d[1]) <= 0:
        return False
    if cb == 0 and _sgn(b[0] * d[0] + b[1] * d[1]) <= 0:
        return False
    return True


def bbox_meets(p, q, box) -> bool:
    """Does the bounding box of segment pq meet the closed box (x0, x1, y0, y1)?"""
    x0, x1, y0, y1 = box
    lox, hix = (p[0], q[0]) if p[0] <= q[0] else (q[0], p[0])
    loy, hiy = (p[1], q[1]) if p[1] <= q[1] else (q[1], p[1])
    return not (hix < x0 or lox > x1 or hiy < y0 or loy > y1)


def in_box(p, box) -> bool:
    x0, x1, y0, y1 = box
    return x0 <= p[0] <= x1 and y0 <= p[1] <= y1


def linf(p, rho=1):
    """max(rho*|x|, |y|): half-height of the smallest rho-square centred at 0 holding p."""
    ax = abs(p[0]) * rho
    ay = abs(p[1])
    return ax if ax >= ay else ay


def key(p) -> tuple:
    """Hashable exact key of a point."""
    return tuple(_coeffs(c) for c in p)


def _coeffs(c):
    return c.coeffs if hasattr(c, "coeffs") else (c,)


def clip_halfplane(poly: list, a, d) -> list:
    """Keep the part of a convex polygon left of (or on) the line through a with direction d."""
    out = []
    n = len(poly)
    if n == 0:
        return out
    vals = [cross(d, sub(p, a)) for p in poly]
    sg = [_sgn(v) for v in vals]
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        sp, sq = sg[i], sg[(i + 1) % n]
        if sp >= 0:
            out.append(p)
        if (sp > 0 and sq < 0) or (sp < 0 and sq > 0):
            t = vals[i] / (vals[i] - vals[(i + 1) % n])
            out.append(add(p, scale(t, sub(q, p))))
    # drop consecutive duplicates
    res = []
    for p in out:
        if not res or key(res[-1]) != key(p):
            res.append(p)
    if len(res) > 1 and key(res[0]) == key(res[-1]):
        res.pop()
    return res


def clip_convex(poly: list, clip: list) -> list:
    """Intersection of convex polygon ``poly`` with convex ccw polygon ``clip``."""
    out = list(poly)
    m = len(clip)
    for i in range(m):
        if len(out) < 3:
            return []
        a, b = clip[i], clip[(i + 1) % m]
        out = clip_halfplane(out, a, sub(b, a))
    return out if len(out) >= 3 and _sgn(area2(out)) != 0 else []


def convex_interiors_overlap(p1: list, p2: list) -> bool:
    """Exact separating-axis test for two convex ccw polygons (open interiors)."""
    for poly, other in ((p1, p2), (p2, p1)):
        n = len(poly)
        for i in range(n):
            a, b = poly[i], poly[(i + 1) % n]
            d = sub(b, a)
            # other entirely on the closed right side => separated
            if all(_sgn(cross(d, sub(q, a))) <= 0 for q in other):
                return False
    return True
