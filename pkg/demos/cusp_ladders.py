"""Ladders in the cusp triangulations of a few torus bundles.

For every cusp the torus of tetrahedron corners is cut along ladderpoles.
The script prints the ladder sizes and writes a drawing of one plane window.

    python demos/cusp_ladders.py [OUTDIR]
"""
import pathlib
import sys

from veerct.cusp_link import cusp_triangulation, cusps, ladder_decomposition, unroll
from veerct.flat_surface import ptorus_from_matrix
from veerct.flip_sweep import sweep_period, to_mapping_torus, word_matrix
from veerct.render import link_svg


def bundle(word):
    surface, phi = ptorus_from_matrix(word_matrix(word))
    return to_mapping_torus(sweep_period(surface, phi))


def main(outdir="."):
    # ladders alternate in direction, so every cusp has an even number of them
    for word in ("RL", "RRL", "RLLR", "RRRL", "RRLRL"):
        v = bundle(word)
        for k in range(len(cusps(v))):
            d = ladder_decomposition(cusp_triangulation(v, k))
            arrows = "".join("^" if ld.ascending else "v" for ld in d.ladders)
            print(f"{word:6s} cusp {k}: {v.tri.n_tets} tetrahedra, {d.n_poles} ladders "
                  f"of sizes {d.ladder_sizes()}, directions {arrows}")

    w = unroll(cusp_triangulation(bundle("RLLR")), (0, 3), 8)
    path = pathlib.Path(outdir) / "rllr_link.svg"
    path.write_text(link_svg(w), encoding="utf-8")
    print(f"wrote {path} ({len(w.triangles)} triangles)")


if __name__ == "__main__":
    main(*sys.argv[1:2])
