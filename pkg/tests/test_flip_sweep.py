import json
from fractions import Fraction

import pytest

import cases
import oracles
from veerct import planar as P
from veerct.flat_surface import ImageEntry, Monodromy, ptorus_from_matrix
from veerct.flip_sweep import (
    ClosureMismatch, DegenerateRect, LayeredTriangulation, aspect_ratio, sweep_period,
    to_mapping_torus, word_matrix,
)
from veerct.veering import (
    Ok, TopologyError, canonical_encode, classify_tetrahedron, validate_taut, validate_veering,
)


def test_aspect_ratio_examples():
    s, phi = cases.surface("RL")
    lam = phi.dilatation
    assert aspect_ratio((s.field(1), s.field(1))) == 1
    assert aspect_ratio((s.field(1), lam * lam)) == lam * lam
    with pytest.raises(DegenerateRect):
        aspect_ratio((s.field(0), s.field(1)))


def test_word_matrix():
    assert word_matrix("RL") == [[2, 1], [1, 1]]
    assert word_matrix("RRL") == [[3, 2], [1, 1]]
    with pytest.raises(ValueError):
        word_matrix("RX")


def test_rl_two_events():
    lay = cases.layered("RL")
    assert len(lay.events) == 2
    assert lay.perturbation is None
    ratios = [e.ratio for e in lay.events]
    assert ratios == sorted(ratios, key=P.fl)
    lam = lay.phi.dilatation
    for r in ratios:
        assert 1 < r <= lam * lam


@pytest.mark.parametrize("word", ["RL", "RRL", "RLLR", "RRRLL", "RLRRLRLL"])
def test_event_count_matches_oracles(word):
    lay = cases.layered(word)
    lam = float(lay.phi.dilatation)
    lo = float(lay.rho0)
    brute = oracles.count_max_rectangles(lay.surface, lo, lo * lam * lam)
    assert len(lay.events) == brute == oracles.farey_count(word_matrix(word)) == len(word)


def test_events_are_inscribed_rectangles():
    lay = cases.layered("RLLR")
    for ev in lay.events:
        (x0, y0), w, h = ev.rectangle()
        assert aspect_ratio((w, h)) == ev.ratio
        lft, bot, rgt, top = ev.quad
        assert lft[0] == x0 and rgt[0] == x0 + w
        assert bot[1] == y0 and top[1] == y0 + h
        for p in (lft, rgt):
            assert y0 < p[1] < y0 + h
        for p in (bot, top):
            assert x0 < p[0] < x0 + w


def test_rllr_four_tetrahedra():
    v = cases.veering("RLLR")
    assert v.tri.n_tets == len(cases.layered("RLLR").events) == 4
    assert validate_taut(v.tri, v.taut) == Ok()
    assert validate_veering(v) == Ok()
    assert v.tri.n_edges() == v.tri.n_tets


def test_rl_mapping_torus():
    v = cases.veering("RL")
    assert v.tri.n_tets == 2 and v.tri.n_edges() == 2
    assert validate_veering(v) == Ok()


def test_invalid_monodromy_does_not_close():
    s, phi = cases.surface("RL")
    fake = Monodromy(phi.dilatation, [ImageEntry(j, P.centroid(t), 1) for j, t in enumerate(s.triangles)])
    with pytest.raises(ClosureMismatch):
        sweep_period(s, fake, 1)


def _normalised(lay):
    lam2 = lay.phi.dilatation ** 2
    out = []
    for e in lay.events:
        r = e.ratio
        while r > lam2:
            r = r / lam2
        while r <= 1:
            r = r * lam2
        out.append(r)
    return sorted(out, key=P.fl)


@pytest.mark.parametrize("word,t0", [("RL", 2), ("RRL", 3)])
def test_events_independent_of_start(word, t0):
    a = cases.layered(word)
    b = cases.layered(word, t0=t0)
    assert len(a.events) == len(b.events)
    assert _normalised(a) == _normalised(b)


def test_check_mode_agrees_with_fresh_delaunay():
    s, phi = cases.surface("RRL")
    lay = sweep_period(s, phi, 1, check=True)
    assert len(lay.events) == 3


def test_cover_has_simultaneous_events_that_commute():
    s, phi = cases.surface("RRL", cases.DOUBLE)
    assert s.n_vertices == 2
    a = cases.layered("RRL", cases.DOUBLE)
    ratios = [e.ratio for e in a.events]
    assert len(ratios) == 6 and len(set(P.key((r, r)) for r in ratios)) == 3
    b = sweep_period(s, phi, 1, tie_order="reverse")
    final = lambda lay: {(lay.triangles[t].key(), lay.triangles[t].sign) for t in lay.closure}
    assert final(a) == final(b)
    assert canonical_encode(to_mapping_torus(a)) == canonical_encode(to_mapping_torus(b))


def test_cover_mapping_torus_is_veering():
    v = cases.veering("RRL", cases.DOUBLE)
    assert v.tri.n_tets == 6
    assert validate_veering(v) == Ok()


def test_hinge_matches_diagonal_slopes():
    for word in ("RL", "RRL", "RLLR"):
        lay, v = cases.layered(word), cases.veering(word)
        for tet, ev in enumerate(lay.events):
            lft, bot, rgt, top = ev.quad
            d1 = P.sub(rgt, lft)
            d2 = P.sub(top, bot)
            same = P.sgn(d1[0] * d1[1]) == P.sgn(d2[0] * d2[1])
            assert classify_tetrahedron(v, tet) == ("NonHinge" if same else "Hinge")


def test_hinge_regression_values():
    kinds = lambda w: [classify_tetrahedron(cases.veering(w), t) for t in range(len(cases.layered(w).events))]
    assert kinds("RL") == ["Hinge", "Hinge"]
    assert sorted(kinds("RLLR")) == ["Hinge", "Hinge", "NonHinge", "NonHinge"]


def test_one_flip_synthetic_layering():
    # a torus glued to itself after a single flip: every closure consistent with the
    # triangle shapes is tried and the validators give the verdict
    full = cases.layered("RL")
    ev = full.events[0]
    tris = [r for r in full.triangles[:4]]
    from dataclasses import replace
    tris = [replace(r, consumed_by=r.consumed_by if n in ev.consumed else None) for n, r in enumerate(tris)]
    verdicts = []
    for b0 in (0, 1):
        for r0 in range(3):
            for r1 in range(3):
                closure = {ev.created[0]: (b0, r0), ev.created[1]: (1 - b0, r1)}
                lay = LayeredTriangulation(full.surface, full.phi, full.base, tris, [ev], closure, full.rho0)
                try:
                    v = to_mapping_torus(lay)
                except (TopologyError, RuntimeError):
                    verdicts.append("rejected")
                    continue
                verdicts.append("ok" if validate_veering(v) == Ok() else "not veering")
    # a single flip never closes up consistently: slope colours clash in every case
    assert verdicts == ["rejected"] * 18


def test_layered_json():
    lay = cases.layered("RL")
    d = json.loads(json.dumps(lay.to_json()))
    assert len(d["events"]) == 2 and len(d["closure"]) == 2
    assert d["perturbation"] is None


def test_negative_trace_sweep():
    s, phi = ptorus_from_matrix([[-2, -1], [-1, -1]])
    lay = sweep_period(s, phi, 1)
    v = to_mapping_torus(lay)
    assert len(lay.events) == 2
    assert validate_veering(v) == Ok()


def test_start_where_images_land_on_edges():
    # at this start the monodromy sends triangle centroids onto edges
    s, phi = ptorus_from_matrix(word_matrix("LRLRLR"))
    lay = sweep_period(s, phi, Fraction(1, 18))
    assert len(lay.events) == 6
    assert validate_veering(to_mapping_torus(lay)) == Ok()
