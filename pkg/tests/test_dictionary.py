import json

import pytest

from cases import surface, veering
from veerct.ct_tess import CTCell, CTWindow, IN_FURROW, RulingSingularity, ct_window, furrow_color
from veerct.cusp_link import cusp_triangulation, unroll
from veerct.dictionary import (
    POLE, RUNG, IncompatibleWindows, IncompleteWindow, agol_to_ct, cell_fan, classify_by_coordinates,
    ct_to_agol, link_skeleton, matched_windows, round_trip_ct, round_trip_link, skeleton_as_link,
    skeleton_as_window, verify_dictionary,
)


@pytest.fixture(scope="module")
def rl_pair():
    s, _ = surface("RL")
    return matched_windows(s, veering("RL"), (0, 2), 6)


@pytest.fixture(scope="module")
def rllr_pair():
    s, _ = surface("RLLR")
    return matched_windows(s, veering("RLLR"), (0, 2), 6)


def _wide(word, geometry=False):
    n = len(word)
    return unroll(cusp_triangulation(veering(word)), (-1, 3), (-2 * n - 3, 2 * n + 3), geometry=geometry)


def test_one_arc_per_triangle():
    w = _wide("RLLR")
    g = agol_to_ct(w)
    assert len(g.edges) + len(g.incomplete) == len(w.triangles)
    assert g.incomplete


def test_strict_window_raises():
    with pytest.raises(IncompleteWindow):
        agol_to_ct(_wide("RL"), strict=True)


@pytest.mark.parametrize("word", ["RL", "RRL", "RLLR"])
def test_paths_visit_ladder_vertices_once(word):
    w = _wide(word)
    g = agol_to_ct(w)
    full = w.full_vertices()
    for j, segs in g.paths.items():
        seen = [v for seg in segs for v in seg]
        assert len(seen) == len(set(seen))
        assert all(v[0] in (j - 1, j) for v in seen)
        # every fully surrounded vertex of the two poles is on the main segment
        main = set(max(segs, key=len))
        for v in full:
            if v[0] in (j - 1, j) and w.poles[0] < j <= w.poles[1]:
                assert v in set(seen)
        assert main


def test_spikeless_cell_collapses_double_edge():
    verts = {k: RulingSingularity(k[0], k[1], None, None) for k in [(0, 0), (0, 1)]}
    cell = CTCell((0, 0), ((0, 0), (0, 1)), (), (), furrow_color(0))
    w = CTWindow((0, 0), (0, 1), verts, {(0, 0): cell}, {0: [(0, 1), (0, 0)], 1: [(0, 0), (0, 1)]})
    assert len(w.edges()) == 2
    g = ct_to_agol(w)
    assert [(e.ends, e.kind) for e in g.edges] == [(((0, 0), (0, 1)), POLE)]


def test_fan_directions():
    blue = CTCell((0, 3), ((0, 3), (0, 4)), ((-1, 7),), ((1, 2),), furrow_color(0))
    assert set(cell_fan(blue)) == {((0, 3), (0, 4), POLE), ((0, 3), (1, 2), RUNG), ((0, 4), (-1, 7), RUNG)}
    red = CTCell((1, 3), ((1, 3), (1, 4)), ((0, 7),), ((2, 2),), furrow_color(1))
    assert set(cell_fan(red)) == {((1, 3), (1, 4), POLE), ((1, 3), (2, 2), RUNG), ((1, 4), (0, 7), RUNG)}


@pytest.mark.parametrize("pair", ["rl_pair", "rllr_pair"])
def test_fans_are_link_edges(pair, request):
    link, ct = request.getfixturevalue(pair)
    edges = link_skeleton(link).edge_set()
    for cell in ct.cells.values():
        for u, v, _ in cell_fan(cell):
            assert tuple(sorted((u, v))) in edges


@pytest.mark.parametrize("pair", ["rl_pair", "rllr_pair"])
def test_ct_edges_are_arcs(pair, request):
    link, ct = request.getfixturevalue(pair)
    arcs = {(e.ladder, e.ends): e.kind for e in agol_to_ct(link).edges}
    for j, u, v, kind in ct.edges():
        assert arcs[(j, tuple(sorted((u, v))))] == kind


def test_ct_to_agol_is_sound(rllr_pair):
    link, ct = rllr_pair
    assert ct_to_agol(ct).edge_set() <= link_skeleton(link).edge_set()


@pytest.mark.parametrize("pair", ["rl_pair", "rllr_pair"])
def test_verify_ok(pair, request):
    link, ct = request.getfixturevalue(pair)
    rep = verify_dictionary(link, ct)
    assert rep.ok, rep.message
    assert rep.counts["cells"] == len(ct.cells) == 18
    assert rep.counts["spikes"] == sum(sum(c.spike_count()) for c in ct.cells.values())
    assert rep.counts["in_furrow"] + rep.counts["cross_furrow"] == len(ct.edges())


def test_rl_has_only_hinges(rl_pair):
    rep = verify_dictionary(*rl_pair)
    assert rep.counts["in_furrow"] == 0


def test_shifted_indices(rllr_pair):
    link, ct = rllr_pair
    rep = verify_dictionary(link, ct.shifted({-1: 2, 0: -5, 1: 3, 2: 1, 3: -4}))
    assert rep.ok, rep.message


def test_incompatible(rl_pair):
    link, ct = rl_pair
    with pytest.raises(IncompatibleWindows):
        verify_dictionary(unroll(cusp_triangulation(veering("RL")), (0, 1), 4), ct)
    s, _ = surface("RLLR")
    with pytest.raises(IncompatibleWindows):
        verify_dictionary(link, ct_window(s, (0, 2), 4))


def test_broken_window_is_reported(rllr_pair):
    link, ct = rllr_pair
    key = sorted(ct.cells)[3]
    cell = ct.cells[key]
    bad = dict(ct.cells)
    bad[key] = CTCell(cell.id, cell.gates, cell.right, cell.left, cell.color)
    rep = verify_dictionary(link, CTWindow(ct.quadrants, ct.positions, ct.vertices, bad, ct.rays))
    assert not rep.ok and rep.row == "spikes"


@pytest.mark.parametrize("word", ["RL", "RRL", "RLLR", "RRRL", "RLRRL"])
def test_round_trip_from_link(word):
    r = round_trip_link(_wide(word))
    assert r.compared > 0
    assert r.ok, (r.missing[:3], r.extra[:3])


@pytest.mark.parametrize("word", ["RL", "RRL", "RLLR", "RRRL"])
def test_round_trip_from_tessellation(word):
    cw = skeleton_as_window(agol_to_ct(_wide(word)))
    r = round_trip_ct(cw)
    assert r.compared > 0 and r.ok


def test_round_trip_from_geometry(rllr_pair):
    r = round_trip_ct(rllr_pair[1])
    assert r.compared > 0 and r.ok


def test_skeleton_as_link_tips(rllr_pair):
    link, _ = rllr_pair
    rebuilt = skeleton_as_link(link_skeleton(link))
    tips = {frozenset(t.corners): t.tip for t in link.triangles}
    assert rebuilt.triangles
    for t in rebuilt.triangles:
        assert tips[frozenset(t.corners)] == t.tip


@pytest.mark.parametrize("word", ["RLLR", "RRL"])
def test_classification_on_every_tetrahedron(word):
    v = veering(word)
    w = unroll(cusp_triangulation(v), (-1, 3), (-8, 8))
    seen = set()
    for t in w.triangles:
        got = classify_by_coordinates(t.ladder, {x: w.vertices[x].coords for x in t.corners})
        assert (got == "Hinge") == t.hinge
        seen.add(t.tet)
    assert seen == set(range(v.tri.n_tets))


def test_classification_patterns():
    # ray pointing up: quadrant 1 on the right, quadrant 0 on the left
    # non-hinge: the top corner shares its side with the middle one
    left = {(0, 0): (5, 1), (0, 1): (3, 2)}      # frame points (-1, 5) and (-2, 3)
    right = {(1, 0): (1, 1)}                     # frame point (1, 1)
    assert classify_by_coordinates(1, {**left, **right}) == "NonHinge"
    right = {(1, 0): (1, 4)}
    assert classify_by_coordinates(1, {**left, **right}) == "Hinge"


def test_json_stable(rl_pair):
    link, _ = rl_pair
    a = json.dumps(agol_to_ct(link).to_json(), sort_keys=True)
    b = json.dumps(agol_to_ct(link).to_json(), sort_keys=True)
    assert a == b
    assert all(e["kind"] in (IN_FURROW, "CrossFurrow") for e in json.loads(a)["edges"])
