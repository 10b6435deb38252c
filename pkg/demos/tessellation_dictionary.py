"""Compare a tessellation window with the matching cusp window.

The tessellation is built from the flat structure alone.  The cusp window
comes from the veering triangulation.  The dictionary check matches vertices,
cells and edges between the two and classifies every cusp triangle.

    python demos/tessellation_dictionary.py [WORD] [OUTDIR]
"""
import pathlib
import sys

from veerct.ct_tess import ct_window, filling_order
from veerct.dictionary import matched_windows, verify_dictionary
from veerct.flat_surface import ptorus_from_matrix
from veerct.flip_sweep import sweep_period, to_mapping_torus, word_matrix
from veerct.render import overlay_svg


def main(word="RLLR", outdir="."):
    surface, phi = ptorus_from_matrix(word_matrix(word))
    v = to_mapping_torus(sweep_period(surface, phi))

    ct = ct_window(surface, (0, 2), 6)
    print(f"{word}: {len(ct.cells)} cells, {len(ct.vertices)} vertices in furrows 0..2")
    for key in filling_order(ct)[:8]:
        cell = ct.cells[key]
        left, right = cell.spike_count()
        print(f"  cell {key}: {cell.color}, {left} spikes on the left, {right} on the right")
    print("  ...")

    link, ct = matched_windows(surface, v, (0, 2), 6)
    rep = verify_dictionary(link, ct)
    print(f"dictionary {'holds' if rep.ok else 'fails at ' + str(rep.row)}:")
    for row, n in sorted(rep.counts.items()):
        print(f"  {row:13s} {n}")

    path = pathlib.Path(outdir) / f"{word.lower()}_overlay.svg"
    path.write_text(overlay_svg(link, ct), encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main(*sys.argv[1:3])
