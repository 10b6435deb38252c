"""Command line front end.

    veerct build      --word RL --out m.json
    veerct validate   --matrix 2,1,1,1
    veerct link       --word RLLR --quadrants 0..3 --depth 8 --svg link.svg
    veerct ct         --word RL --quadrants 0..2 --depth 6 --json ct.json
    veerct dict-check --word RL --quadrants 0..2 --depth 6
    veerct export     --surface surf.json --out bundle.json

Exit status is 0 on success, 1 when a validation or dictionary check fails
and 2 when a budget or window limit is hit.  JSON is written with sorted keys
so identical invocations produce identical bytes.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

COMMANDS = {"build": "Build", "validate": "Validate", "link": "Link", "ct": "CT",
            "dict-check": "DictCheck", "export": "Export"}


class UsageError(ValueError):
    """Bad command line."""


@dataclass(frozen=True)
class Plan:
    command: str                        # Build, Validate, Link, CT, DictCheck or Export
    word: Optional[str] = None
    matrix: Optional[tuple] = None      # ((a, b), (c, d))
    surface: Optional[str] = None       # path of a surface JSON file
    cusp: int = 0
    quadrants: tuple = (0, 2)
    depth: int = 6
    budget: Optional[Fraction] = None
    svg: Optional[str] = None
    json: Optional[str] = None
    out: Optional[str] = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="veerct", add_help=False)
    p.add_argument("command", choices=sorted(COMMANDS))
    src = p.add_mutually_exclusive_group()
    src.add_argument("--word")
    src.add_argument("--matrix")
    src.add_argument("--surface")
    p.add_argument("--cusp", type=int, default=0)
    p.add_argument("--quadrants", default="0..2")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--budget")
    p.add_argument("--svg")
    p.add_argument("--json")
    p.add_argument("--out")
    return p


def _word_matrix(word: str) -> tuple:
    if not re.fullmatch(r"[RL]+", word):
        raise UsageError(f"word {word!r} must consist of the letters R and L")
    from .flip_sweep import word_matrix
    m = word_matrix(word)
    return tuple(tuple(r) for r in m)


def _parse_matrix(text: str) -> tuple:
    try:
        vals = [int(x) for x in re.split(r"[,;\s\[\]]+", text.strip()) if x]
    except ValueError:
        raise UsageError(f"matrix {text!r} must list four integers") from None
    if len(vals) != 4:
        raise UsageError(f"matrix {text!r} must list four integers")
    return ((vals[0], vals[1]), (vals[2], vals[3]))


def _check_matrix(m: tuple):
    (a, b), (c, d) = m
    if a * d - b * c != 1:
        raise UsageError(f"matrix {m} does not have determinant 1")
    if abs(a + d) <= 2:
        raise UsageError(f"matrix {m} has trace {a + d} and is not hyperbolic")


def _parse_range(text: str) -> tuple:
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text)
    if not m:
        raise UsageError(f"range {text!r} must look like a..b")
    a, b = int(m.group(1)), int(m.group(2))
    if b < a:
        raise UsageError(f"range {text!r} is empty")
    return a, b


VALUED = ("--word", "--matrix", "--surface", "--cusp", "--quadrants", "--depth", "--budget",
          "--svg", "--json", "--out")


def _glue(argv) -> list:
    # values such as -1..2 would otherwise be taken for flags
    out, it = [], iter(argv)
    for a in it:
        if a in VALUED:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def parse_args(argv) -> Plan:
    """Validate the command line and turn it into a Plan."""
    ns = _parser().parse_args(_glue(argv))
    matrix = None
    if ns.word is not None:
        matrix = _word_matrix(ns.word)
    elif ns.matrix is not None:
        matrix = _parse_matrix(ns.matrix)
    elif ns.surface is None:
        raise UsageError("one of --word, --matrix or --surface is required")
    if matrix is not None:
        _check_matrix(matrix)
    if ns.depth <= 0:
        raise UsageError("--depth must be positive")
    if ns.cusp < 0:
        raise UsageError("--cusp must be non-negative")
    budget = None
    if ns.budget is not None:
        try:
            budget = Fraction(ns.budget)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"budget {ns.budget!r} is not a fraction p/q") from None
        if budget <= 0:
            raise UsageError("--budget must be positive")
    return Plan(COMMANDS[ns.command], ns.word, matrix, ns.surface, ns.cusp, _parse_range(ns.quadrants),
                ns.depth, budget, ns.svg, ns.json, ns.out)


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def _dump(data) -> str:
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def _write(path: Optional[str], text: str, stdout):
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load(plan: Plan):
    from .flat_surface import load_surface, ptorus_from_matrix
    if plan.surface is not None:
        with open(plan.surface, encoding="utf-8") as fh:
            surface, mono = load_surface(json.load(fh))
        if mono is None:
            raise UsageError(f"{plan.surface} has no monodromy")
        return surface, mono
    return ptorus_from_matrix([list(r) for r in plan.matrix])


def _bundle(plan: Plan):
    from .flip_sweep import sweep_period, to_mapping_torus
    surface, mono = _load(plan)
    layered = sweep_period(surface, mono)
    return surface, mono, layered, to_mapping_torus(layered)


def _source(plan: Plan) -> dict:
    out = {}
    if plan.word is not None:
        out["word"] = plan.word
    if plan.matrix is not None:
        out["matrix"] = [list(r) for r in plan.matrix]
    if plan.surface is not None:
        out["surface"] = plan.surface
    return out


def _report(v) -> dict:
    from .veering import Ok, validate_taut, validate_veering
    checks = {"taut": validate_taut(v.tri, v.taut), "veering": validate_veering(v)}
    return {k: ("Ok" if isinstance(r, Ok) else repr(r)) for k, r in checks.items()}


def _build(plan: Plan, stdout) -> int:
    from .veering import canonical_encode
    _, _, layered, v = _bundle(plan)
    rep = _report(v)
    data = {**_source(plan), "tetrahedra": v.tri.n_tets, "events": len(layered.events),
            "encoding": canonical_encode(v), "checks": rep, "triangulation": v.to_json()}
    _write(plan.out or plan.json, _dump(data), stdout)
    return 0 if all(r == "Ok" for r in rep.values()) else 1


def _validate(plan: Plan, stdout) -> int:
    from .cusp_link import StructureViolation, cusp_triangulation, cusps, ladder_decomposition
    from .square_delaunay import validate_cellulation
    _, _, layered, v = _bundle(plan)
    rep = _report(v)
    cell = validate_cellulation(layered.base)
    rep["cellulation"] = "Ok" if cell.ok else repr(cell)
    for k in range(len(cusps(v))):
        try:
            d = ladder_decomposition(cusp_triangulation(v, k))
            rep[f"cusp {k}"] = f"Ok: {d.n_poles} ladders of sizes {d.ladder_sizes()}"
        except StructureViolation as exc:
            rep[f"cusp {k}"] = f"StructureViolation: {exc}"
    ok = all(r.startswith("Ok") for r in rep.values())
    _write(plan.json or plan.out, _dump({**_source(plan), "ok": ok, "checks": rep}), stdout)
    return 0 if ok else 1


def _link(plan: Plan, stdout) -> int:
    from .cusp_link import cusp_triangulation, unroll
    from .render import link_svg
    _, _, _, v = _bundle(plan)
    a, b = plan.quadrants
    w = unroll(cusp_triangulation(v, plan.cusp), (a, b), plan.depth)
    _write(plan.json or plan.out, _dump({**_source(plan), "window": w.to_json()}), stdout)
    if plan.svg:
        _write(plan.svg, link_svg(w), stdout)
    return 0


def _ct(plan: Plan, stdout) -> int:
    from .ct_tess import ct_window
    from .flat_surface import cell_cap
    from .render import ct_svg
    surface, _ = _load(plan)
    w = ct_window(surface, plan.quadrants, plan.depth, budget=plan.budget, cap=cell_cap())
    _write(plan.json or plan.out, _dump({**_source(plan), "window": w.to_json()}), stdout)
    if plan.svg:
        _write(plan.svg, ct_svg(w), stdout)
    return 0


def _dict_check(plan: Plan, stdout) -> int:
    from .dictionary import matched_windows, round_trip_ct, verify_dictionary
    from .flat_surface import cell_cap
    from .render import overlay_svg
    surface, _, _, v = _bundle(plan)
    link, ct = matched_windows(surface, v, plan.quadrants, plan.depth, cusp=plan.cusp,
                               budget=plan.budget, cap=cell_cap())
    rep = verify_dictionary(link, ct)
    trip = round_trip_ct(ct)
    ok = rep.ok and trip.ok
    data = {**_source(plan), "ok": ok, "dictionary": rep.to_json(),
            "round_trip": {"compared": trip.compared, "missing": len(trip.missing), "extra": len(trip.extra)}}
    _write(plan.json or plan.out, _dump(data), stdout)
    if plan.svg:
        _write(plan.svg, overlay_svg(link, ct), stdout)
    return 0 if ok else 1


def _export(plan: Plan, stdout) -> int:
    from .flat_surface import dump_surface
    from .veering import canonical_encode
    surface, mono, layered, v = _bundle(plan)
    data = {**_source(plan), "surface": dump_surface(surface, mono), "sweep": layered.to_json(),
            "triangulation": v.to_json(), "encoding": canonical_encode(v)}
    _write(plan.out or plan.json, _dump(data), stdout)
    return 0


RUNNERS = {"Build": _build, "Validate": _validate, "Link": _link, "CT": _ct,
           "DictCheck": _dict_check, "Export": _export}


def execute(plan: Plan, stdout=None, stderr=None) -> int:
    """Run a plan; returns the exit status."""
    from .ct_tess import AxisTie, WindowTooSmall
    from .dictionary import IncompatibleWindows, IncompleteWindow
    from .flat_surface import BudgetExhausted
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        return RUNNERS[plan.command](plan, stdout)
    except (BudgetExhausted, WindowTooSmall, IncompleteWindow) as exc:
        stderr.write(_dump({"error": type(exc).__name__, "message": str(exc)}))
        return 2
    except (IncompatibleWindows, AxisTie, UsageError) as exc:
        stderr.write(_dump({"error": type(exc).__name__, "message": str(exc)}))
        return 1


def main(argv=None) -> int:
    try:
        plan = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        sys.stderr.write(f"veerct: {exc}\n")
        return 64
    return execute(plan)


if __name__ == "__main__":
    sys.exit(main())
