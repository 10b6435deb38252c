"""End to end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line with its wall time; conftest repeats
the lines at the end of the run.  Timed criteria fail when over their limit.
Bundles built in one criterion are reused by later ones.
"""
import itertools
import random
from collections import Counter
from fractions import Fraction

import cases
from oracles import count_max_rectangles, farey_count, spike_oracle
from report import criterion
from veerct.ct_tess import ct_window, filling_order
from veerct.cusp_link import cusp_triangulation, cusps, ladder_decomposition, unroll
from veerct.dictionary import (
    agol_to_ct, matched_windows, round_trip_ct, round_trip_link, skeleton_as_window,
    verify_dictionary,
)
from veerct.flat_surface import ptorus_from_matrix
from veerct.flip_sweep import aspect_ratio, sweep_period, to_mapping_torus, word_matrix
from veerct.square_delaunay import delaunay, validate_cellulation
from veerct.veering import Ok, canonical_encode, classify_tetrahedron, validate_taut, validate_veering


def necklaces(max_len, min_len=2):
    """Cyclic words in R and L using both letters, one representative per rotation class."""
    out = []
    for n in range(min_len, max_len + 1):
        for t in itertools.product("RL", repeat=n):
            w = "".join(t)
            if "R" in w and "L" in w and w == min(w[k:] + w[:k] for k in range(n)):
                out.append(w)
    return out


WORDS = necklaces(8)
SHORT = necklaces(6)
BUILT = {}          # word or (word, sublattice) -> (surface, phi, layered, veering)
CT_WINDOWS = []     # (label, surface, window), collected for the traversal criterion


def build(key):
    if key not in BUILT:
        word, sub = key if isinstance(key, tuple) else (key, None)
        s, phi = ptorus_from_matrix(word_matrix(word), sublattice=sub)
        lay = sweep_period(s, phi)
        BUILT[key] = (s, phi, lay, to_mapping_torus(lay))
    return BUILT[key]


def all_bundles():
    return [build(w) for w in WORDS] + [build(("RRL", cases.DOUBLE))]


def rectangle_count(s, lay):
    lo = float(lay.rho0)
    return count_max_rectangles(s, lo, float(lay.rho_end))


def test_necklace_counts():
    assert [sum(len(w) == n for w in WORDS) for n in range(2, 9)] == [1, 2, 4, 6, 12, 18, 34]
    assert len(SHORT) == 25


def test_criterion_1_rl_bundle():
    with criterion(1, "RL: two flips, two tetrahedra, valid, matches the rectangle count", budget=5):
        s, phi = ptorus_from_matrix(word_matrix("RL"))
        lay = sweep_period(s, phi)
        v = to_mapping_torus(lay)
        assert len(lay.events) == 2
        assert v.tri.n_tets == 2
        assert validate_taut(v.tri, v.taut) == Ok()
        assert validate_veering(v) == Ok()
        assert rectangle_count(s, lay) == 2
        BUILT["RL"] = (s, phi, lay, v)


def test_criterion_2_all_short_words():
    with criterion(2, f"{len(WORDS)} words up to length 8: counts, validity, stable encoding", budget=120):
        for w in WORDS:
            s, phi, lay, v = build(w)
            n = v.tri.n_tets
            assert n == len(lay.events), w
            assert n == farey_count(word_matrix(w)), w
            assert n == rectangle_count(s, lay), w
            assert validate_taut(v.tri, v.taut) == Ok(), w
            assert validate_veering(v) == Ok(), w
            code = canonical_encode(v)
            rng = random.Random(w)
            for _ in range(10):
                assert canonical_encode(cases.relabel(v, rng)) == code, w


def _scales(lay):
    """Five aspects inside each flip-free interval of the period."""
    cuts = sorted({lay.rho0, lay.rho_end} | {e.ratio for e in lay.events})
    out = []
    for a, b in zip(cuts, cuts[1:]):
        out.extend(a + (b - a) * Fraction(k, 6) for k in range(1, 6))
    return out


def test_criterion_3_cellulations():
    with criterion(3, f"{len(SHORT)} words up to length 6: every intermediate cellulation is valid",
                   budget=120):
        checked = 0
        for w in SHORT:
            s, phi = ptorus_from_matrix(word_matrix(w))
            # a period centred on aspect 1 keeps the squares least elongated
            start = Fraction(1 / phi.dilatation.approx()).limit_denominator(97)
            lay = sweep_period(s, phi, start)
            for rho in _scales(lay):
                c = delaunay(s, rho)
                rep = validate_cellulation(c)
                assert rep.ok, (w, rho, rep)
                assert c.euler_characteristic() == s.euler_characteristic(), (w, rho)
                checked += 1
        assert checked >= 5 * len(SHORT)


def _final(lay):
    return {(lay.triangles[t].key(), lay.triangles[t].sign) for t in lay.closure}


def test_criterion_4_event_rectangles():
    with criterion(4, "flip rectangles have the event aspect; simultaneous flips commute"):
        ties = 0
        for (s, phi, lay, v), key in zip(all_bundles(), WORDS + [("RRL", cases.DOUBLE)]):
            ratios = [e.ratio for e in lay.events]
            assert ratios == sorted(ratios)
            for e in lay.events:
                _, wd, ht = e.rectangle()
                assert e.ratio * wd == ht
                assert aspect_ratio((wd, ht)) == e.ratio
                assert lay.rho0 < e.ratio <= lay.rho_end
            if len(set(ratios)) < len(ratios):
                ties += 1
                other = sweep_period(s, phi, tie_order="reverse")
                assert _final(other) == _final(lay), key
                assert canonical_encode(to_mapping_torus(other)) == canonical_encode(v), key
        assert ties >= 1


def test_criterion_5_ladders():
    with criterion(5, "every cusp splits into ladders with the expected pole, parity and hinge structure"):
        for s, phi, lay, v in all_bundles():
            for k in range(len(cusps(v))):
                c = cusp_triangulation(v, k)
                d = ladder_decomposition(c)
                assert d.n_poles % 2 == 0
                asc = [ld.ascending for ld in d.ladders]
                assert all(a != b for a, b in zip(asc, asc[1:] + asc[:1]))
                for n, lt in enumerate(c.triangles):
                    assert c.hinge(n) == (classify_tetrahedron(v, lt.tet) == "Hinge")
                reach = 2 * max(len(p.vertices) for p in d.poles) + 3
                w = unroll(c, (-1, d.n_poles), (-reach, reach), geometry=False)
                deg = Counter(x for e in w.pole_edges() for x in e)
                full = w.full_vertices()
                assert {w.vertices[x].torus_vertex for x in full} == set(range(c.n_vertices))
                assert all(deg[x] == 2 for x in full)


def _link_window(v, n):
    return unroll(cusp_triangulation(v), (-1, 3), (-2 * n - 3, 2 * n + 3), geometry=False)


def test_criterion_6_round_trips():
    with criterion(6, f"{len(SHORT)} words: both dictionary directions round-trip"):
        for w in SHORT:
            win = _link_window(build(w)[3], len(w))
            assert win.poles[1] - win.poles[0] + 1 >= 3
            assert win.positions[1] - win.positions[0] >= 6
            r = round_trip_link(win)
            assert r.ok and r.compared > 0, w
            cw = skeleton_as_window(agol_to_ct(win))
            r = round_trip_ct(cw)
            assert r.ok and r.compared > 0, w
            CT_WINDOWS.append((f"skeleton {w}", None, cw))


def test_criterion_7_dictionary():
    with criterion(7, "RL and RLLR: geometric link and tessellation windows agree row by row", budget=60):
        rows = ("vertices", "furrows", "cells", "spikes", "in_furrow", "cross_furrow", "classified")
        total = Counter()
        for w in ("RL", "RLLR"):
            s, _, _, v = build(w)
            link, ct = matched_windows(s, v, (0, 2), 6)
            rep = verify_dictionary(link, ct)
            assert rep.ok, (w, rep.row, rep.message)
            assert set(rows) <= set(rep.counts), w
            total.update(rep.counts)
            CT_WINDOWS.append((f"matched {w}", s, ct))
        # RL alone has no edge inside a furrow
        assert all(total[row] > 0 for row in rows), total


SPIKE_WORDS = ("RL", "RRL", "RLLR", "RRLL", "RRRL", "RRLRL")


def test_criterion_8_spikes_and_staircases():
    with criterion(8, "100 sampled cells match the lattice spike count; staircases are monotone"):
        pool = []
        for w in SPIKE_WORDS:
            s = build(w)[0]
            win = ct_window(s, (0, 2), 6)
            CT_WINDOWS.append((f"ct {w}", s, win))
            pool.extend((w, s, win, key) for key in sorted(win.cells))
            for i in range(win.quadrants[0], win.quadrants[1] + 1):
                pts = sorted((vid[1], win.vertices[vid]) for vid in win.vertices if vid[0] == i)
                for (_, a), (_, b) in zip(pts, pts[1:]):
                    assert a.x < b.x and a.y > b.y, (w, i)
        assert len(pool) == 108
        for w, s, win, key in random.Random(8).sample(pool, 100):
            cell = win.cells[key]
            gates = tuple((win.vertices[g].x, win.vertices[g].y) for g in cell.gates)
            assert cell.spike_count() == spike_oracle(s, key[0], gates), (w, key)


def _check_boustrophedon(win):
    order = filling_order(win)
    assert sorted(order) == sorted(win.cells)
    furrows = [c[0] for c in order]
    assert furrows == sorted(furrows)
    for i, run in itertools.groupby(order, key=lambda c: c[0]):
        s = [c[1] for c in run]
        assert s == (sorted(s) if i % 2 == 0 else sorted(s, reverse=True))
        assert all(abs(a - b) == 1 for a, b in zip(s, s[1:]))


def test_criterion_9_filling_order():
    with criterion(9, "every tessellation window is filled furrow by furrow, alternating direction"):
        if not CT_WINDOWS:      # run on its own
            CT_WINDOWS.extend((f"ct {w}", None, ct_window(build(w)[0], (0, 2), 6)) for w in SPIKE_WORDS)
        for label, _, win in CT_WINDOWS:
            _check_boustrophedon(win)
