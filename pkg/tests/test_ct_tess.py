import json

import pytest

from cases import surface, veering
from oracles import lattice_window, spike_oracle, staircase_bruteforce
from veerct import planar as P
from veerct.ct_tess import (
    CROSS_FURROW, IN_FURROW, LEFT, RIGHT, AxisTie, Hook, PlanarMock, Quadrant, WindowTooSmall,
    ct_window, filling_order, rectangle_chain, staircase, subdivide_cell, vertex_hooks,
)
from veerct.cusp_link import cusp_triangulation, unroll
from veerct.flat_surface import BudgetExhausted, to_quadrant_coords


@pytest.fixture(scope="module")
def rl():
    s, _ = surface("RL")
    return s, ct_window(s, (0, 1), 4)


@pytest.fixture(scope="module")
def rllr():
    s, _ = surface("RLLR")
    return s, ct_window(s, (0, 1), 4)


@pytest.mark.parametrize("word", ["RL", "RLLR", "RRRL"])
@pytest.mark.parametrize("q", range(4))
def test_staircase_matches_lattice(word, q):
    s, _ = surface(word)
    got = staircase(s, q, (-2, 3))
    ref = staircase_bruteforce(s, lambda w: to_quadrant_coords(q, w), s.field(int(P.fl(got[0].y + got[-1].x)) + 1))
    keys = [P.key(z) for z in ref]
    start = keys.index(P.key((got[0].x, got[0].y)))
    assert [P.key((p.x, p.y)) for p in got] == keys[start:start + len(got)]
    # position 0 is the first point on or below the diagonal
    zero = [p for p in got if p.s == 0][0]
    before = [p for p in got if p.s == -1][0]
    assert zero.x >= zero.y and before.x < before.y


def test_staircase_monotone():
    s, _ = surface("RRL")
    pts = staircase(s, Quadrant(1, 0), 6)
    assert [p.s for p in pts] == list(range(-3, 3))
    for a, b in zip(pts, pts[1:]):
        assert a.x < b.x and a.y > b.y


def test_staircase_depth_zero():
    s, _ = surface("RL")
    assert staircase(s, 0, 0) == []


def test_staircase_budget():
    s, _ = surface("RL")
    with pytest.raises(BudgetExhausted):
        staircase(s, 0, 6, cap=3)


def test_window_too_small():
    s, _ = surface("RL")
    with pytest.raises(WindowTooSmall):
        ct_window(s, (0, 1), 8, budget=1, grow=False)


def test_empty_window():
    s, _ = surface("RL")
    w = ct_window(s, (0, 1), 0)
    assert w.cells == {} and w.edges() == []


def test_certificate_is_empty_rectangle():
    s, _ = surface("RLLR")
    for p in staircase(s, 2, 4):
        x, y = p.certificate
        assert (x, y) == (p.x, p.y)
        for w in lattice_window(s, 12):
            z = to_quadrant_coords(2, w)
            assert not (0 < z[0] < x and 0 < z[1] < y)


@pytest.mark.parametrize("word", ["RL", "RLLR"])
def test_spikes_match_lattice(word, request):
    s, w = request.getfixturevalue(word.lower())
    for (i, t), cell in w.cells.items():
        gates = tuple((w.vertices[g].x, w.vertices[g].y) for g in cell.gates)
        assert cell.spike_count() == spike_oracle(s, i, gates)


def test_spike_counts_regression(rl, rllr):
    assert {c.spike_count() for c in rl[1].cells.values()} == {(1, 1)}
    got = sorted((k, c.spike_count()) for k, c in rllr[1].cells.items())
    assert got == [((0, -2), (2, 0)), ((0, -1), (0, 2)), ((0, 0), (2, 0)), ((0, 1), (0, 2)),
                   ((1, -2), (0, 2)), ((1, -1), (2, 0)), ((1, 0), (0, 2)), ((1, 1), (2, 0))]


@pytest.mark.parametrize("word", ["RL", "RLLR"])
def test_cell_edge_types(word, request):
    _, w = request.getfixturevalue(word.lower())
    for cell in w.cells.values():
        for path, spikes in zip(cell.boundary(), (cell.left, cell.right)):
            kinds = [IN_FURROW if u[0] == v[0] else CROSS_FURROW for u, v in zip(path, path[1:])]
            if spikes:
                assert kinds.count(CROSS_FURROW) == 2
                assert kinds.count(IN_FURROW) == len(spikes) - 1
            else:
                assert kinds == [IN_FURROW]


@pytest.mark.parametrize("word", ["RL", "RLLR"])
def test_cell_edges_lie_on_rays(word, request):
    _, w = request.getfixturevalue(word.lower())
    ray_edges = {frozenset((u, v)): k for _, u, v, k in w.edges()}
    for cell in w.cells.values():
        for u, v, kind in cell.edges():
            assert ray_edges[frozenset((u, v))] == kind


def test_cell_colours(rl):
    _, w = rl
    for (i, _), cell in w.cells.items():
        assert cell.color == ("B" if i % 2 == 0 else "R")
        assert Quadrant(i, 0).vertex_color != cell.color


def test_window_deterministic():
    s, _ = surface("RL")
    a = json.dumps(ct_window(s, (0, 1), 4).to_json(), sort_keys=True)
    b = json.dumps(ct_window(s, (0, 1), 4).to_json(), sort_keys=True)
    assert a == b


@pytest.mark.parametrize("word", ["RL", "RLLR"])
def test_vertices_agree_with_link(word):
    s, _ = surface(word)
    w = ct_window(s, (0, 2), 4)
    lw = unroll(cusp_triangulation(veering(word)), (-1, 3), (-5, 6))
    for k, v in w.vertices.items():
        assert P.key(lw.vertices[k].coords) == P.key((v.x, v.y))


def test_filling_order_example():
    keys = [(i, s) for i in range(2) for s in range(3)]
    assert filling_order(keys) == [(0, 0), (0, 1), (0, 2), (1, 2), (1, 1), (1, 0)]


def test_filling_order_window(rllr):
    _, w = rllr
    order = filling_order(w)
    assert sorted(order) == sorted(w.cells)
    assert order[:4] == [(0, -2), (0, -1), (0, 0), (0, 1)]
    assert order[4:] == [(1, 1), (1, 0), (1, -1), (1, -2)]


def test_hook_sides_meet():
    for t in (P.fl(1.5), 2, 7):
        assert Hook(1, t, LEFT).key() == Hook(1, t, RIGHT).key()
    assert Hook(1, 3, LEFT).key() != Hook(1, 2, LEFT).key()
    with pytest.raises(ValueError):
        Hook(0, 0, LEFT)
    with pytest.raises(ValueError):
        Hook(0, 1, "Up")


def test_vertex_hooks(rl):
    _, w = rl
    for p in w.vertices.values():
        a, b = vertex_hooks(p)
        assert a.quadrant() == b.quadrant() == p.quadrant
        assert a.t == p.y and b.t == p.x


def test_mock_two_rectangles():
    mock = PlanarMock([(2, 6), (6, 2), (9, 9)], {(0, 0): ((1, 5), (5, 1))})
    sd = subdivide_cell(mock, (0, 0))
    assert sd.k == 2
    assert sd.chain == ((1, 5), (2, 6), (6, 2), (5, 1))
    assert sd.order == [0, 1, 2]
    assert sd.adjacency == [(0, 1), (1, 2)]


def test_mock_three_rectangles_odd_furrow():
    mock = PlanarMock([(2, 7), (6, 6), (7, 2), (3, 9)])
    sd = mock.subdivide((1, 0), (1, 5), (5, 1))
    assert sd.k == 3
    assert sd.chain[1:-1] == ((2, 7), (6, 6), (7, 2))
    assert sd.order == [3, 2, 1, 0]
    assert len(sd.disks) == 4


def test_mock_tie():
    with pytest.raises(AxisTie):
        rectangle_chain((1, 5), (5, 1), [(2, 6), (2, 8), (6, 2)])


def _chain_oracle(s, i, ps, pt):
    """Rectangles beyond the step from lattice translates of the puncture."""
    cx, cy = P.fl(ps[0]), P.fl(pt[1])
    pts = [tuple(P.fl(c) for c in to_quadrant_coords(i, w)) for w in lattice_window(s, 14)]
    beyond = [z for z in pts if z[0] > cx and z[1] > cy]
    stairs = sorted(z for z in beyond if not any(o[0] < z[0] and o[1] < z[1] for o in beyond))
    valid = [t for t in range(len(stairs) - 1)
             if stairs[t][1] > P.fl(ps[1]) and stairs[t + 1][0] > P.fl(pt[0])]
    return stairs[valid[0]:valid[-1] + 2]


@pytest.mark.parametrize("cell", [(0, -1), (1, -1), (1, 0)])
def test_subdivision_matches_lattice(rl, cell):
    s, w = rl
    sd = subdivide_cell(w, cell, s)
    ref = _chain_oracle(s, cell[0], sd.chain[0], sd.chain[-1])
    got = [tuple(P.fl(c) for c in z) for z in sd.chain[1:-1]]
    assert len(got) == len(ref)
    assert all(abs(a - b) < 1e-9 for z, r in zip(got, ref) for a, b in zip(z, r))


def test_rl_subdivision_regression(rl):
    s, w = rl
    sd = subdivide_cell(w, (0, -1), s)
    assert sd.k == 3
    got = [[round(P.fl(c), 4) for c in z] for z in sd.chain]
    assert got == [[0.618, 1.618], [1.2361, 3.2361], [2.2361, 2.2361], [3.2361, 1.2361], [1.618, 0.618]]
    assert sd.order == [0, 1, 2, 3]
