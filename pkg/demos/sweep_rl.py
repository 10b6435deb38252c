"""Build the veering triangulation of the RL bundle step by step.

The punctured torus with monodromy [[2, 1], [1, 1]] is swept through one
period of aspect ratios.  Each diagonal exchange is a tetrahedron; the script
prints the exchanges, the resulting triangulation and its checks.

    python demos/sweep_rl.py [WORD]
"""
import sys

from veerct.flat_surface import ptorus_from_matrix
from veerct.flip_sweep import sweep_period, to_mapping_torus, word_matrix
from veerct.veering import canonical_encode, classify_tetrahedron, validate_taut, validate_veering


def main(word="RL"):
    m = word_matrix(word)
    surface, phi = ptorus_from_matrix(m)
    print(f"word {word}: matrix {m}, stretch factor {phi.dilatation.approx():.6f}")

    lay = sweep_period(surface, phi)
    print(f"aspect ratios swept: ({lay.rho0.approx():.4f}, {lay.rho_end.approx():.4f}]")
    for k, ev in enumerate(lay.events):
        (x, y), w, h = ev.rectangle()
        print(f"  exchange {k}: aspect {ev.ratio.approx():.6f}, "
              f"rectangle {w.approx():.4f} x {h.approx():.4f} at ({x.approx():.4f}, {y.approx():.4f})")

    v = to_mapping_torus(lay)
    kinds = [classify_tetrahedron(v, t) for t in range(v.tri.n_tets)]
    print(f"{v.tri.n_tets} tetrahedra: {', '.join(kinds)}")
    print(f"taut: {validate_taut(v.tri, v.taut)}, veering: {validate_veering(v)}")
    print(f"canonical encoding: {canonical_encode(v)}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
