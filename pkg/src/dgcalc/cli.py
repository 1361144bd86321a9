"""``dgcalc`` command line front end.

Exit codes: 0 success or true, 1 a check came out false, 2 bad input.
With ``--machine`` every subcommand prints ``key<TAB>value`` records instead
of the human-readable layout.
"""
from __future__ import annotations

import argparse
import io
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from . import parallel
from .chart import check_morphism, classical_locus_ideal, is_classical_point, validate_chart
from .derived import decompose_roundtrip, factorize, homotopy_pullback, shifted_zero_locus
from .errors import DgCalcError, InputError
from .fileformat import (Workspace, format_chart, format_derivation, format_linfty, format_map,
                         format_section, parse_point, parse_text)
from .graded_poly import format_polynomial
from .koszul import koszul
from .linfty import check_linfty, from_dg_chart, to_dg_chart
from .oracle import TruncationSpec, bounded_cohomology
from .tangent import cohomology_dims, is_pointwise_weq, tangent_complex

SUBCOMMANDS = ("validate", "h0", "classical", "tangent", "cohomology", "koszul", "zero-locus",
               "factorize", "pullback", "decompose", "weq", "linfty-to-chart", "chart-to-linfty")


class _Out:
    def __init__(self, machine: bool):
        self.machine = machine
        self.buf = io.StringIO()

    def text(self, s: str = ""):
        if not self.machine:
            self.buf.write(s if s.endswith("\n") else s + "\n")

    def rec(self, key: str, *values):
        if self.machine:
            self.buf.write(key + "".join("\t" + str(v) for v in values) + "\n")

    def block(self, s: str):
        """Chart-file text: emitted verbatim in both modes."""
        if self.machine:
            for line in s.splitlines():
                self.rec("text", line)
        else:
            self.buf.write(s)


def _load(paths, validate=True) -> Workspace:
    ws = Workspace()
    for p in paths:
        try:
            text = Path(p).read_text()
        except OSError as e:
            raise InputError(f"cannot read {p}: {e.strerror}") from None
        try:
            parse_text(text, ws, validate=validate)
        except InputError as e:
            e.message = f"{p}: {e.message}"
            e.args = (str(e),)
            raise
    return ws


def _points(args, ws: Workspace) -> list[dict]:
    pts = [parse_point(p) for p in (args.point or [])]
    for f in getattr(args, "probes", None) or []:
        pts.extend(_load([f]).points)
    return pts or list(ws.points)


def _fmt_point(p) -> str:
    return ", ".join(f"{k}={v}" for k, v in p.items()) or "(empty point)"


def _matrix_lines(m, rows, cols) -> list[str]:
    if rows == 0 or cols == 0:
        return [f"  ({rows}x{cols})"]
    width = max(len(str(v)) for row in m for v in row)
    return ["  " + " ".join(str(v).rjust(width) for v in row) for row in m]


# -- subcommands -----------------------------------------------------------

def cmd_validate(args, out: _Out) -> int:
    ws = _load(args.files, validate=False)
    bad = 0
    for c in ws.charts.values():
        diag = validate_chart(c)
        bad += not diag
        out.text(f"chart {c.name}: {diag}")
        out.rec("chart", c.name, "ok" if diag else diag.kind, diag.generator or "-")
    for f in ws.maps.values():
        diag = check_morphism(f)
        bad += not diag
        out.text(f"map {f.name}: {diag}")
        out.rec("map", f.name, "ok" if diag else diag.kind, diag.generator or "-")
    for L in ws.linfty.values():
        chk = check_linfty(L)
        bad += not chk
        msg = "ok" if chk else f"fails at arity {chk.arity} on {chk.generator}: residue {chk.residue}"
        out.text(f"linfty {L.name}: {msg}")
        out.rec("linfty", L.name, "ok" if chk else f"arity {chk.arity}", chk.generator or "-")
    return 1 if bad else 0


def cmd_h0(args, out: _Out) -> int:
    c = _load(args.files).chart(args.chart)
    ideal = classical_locus_ideal(c)
    ring = "Q[" + ", ".join(c.base) + "]"
    out.text(f"chart {c.name}")
    out.text(f"ring {ring}")
    out.text("ideal" + ("" if ideal.generators else " (0)"))
    out.rec("ring", *c.base)
    for g in ideal.generators:
        out.text(f"  {format_polynomial(g)}")
        out.rec("generator", format_polynomial(g))
    return 0


def cmd_classical(args, out: _Out) -> int:
    ws = _load(args.files)
    c = ws.chart(args.chart)
    pts = _points(args, ws)
    if not pts:
        raise InputError("no points given (use --point, --probes or point lines)")
    allok = True
    for p in pts:
        ok = is_classical_point(c, p)
        allok &= ok
        out.text(f"{_fmt_point(p)}: {'classical' if ok else 'not classical'}")
        out.rec("point", _fmt_point(p), "true" if ok else "false")
    return 0 if allok else 1


def cmd_tangent(args, out: _Out) -> int:
    ws = _load(args.files)
    c = ws.chart(args.chart)
    pts = _points(args, ws)
    if not pts:
        raise InputError("no points given (use --point, --probes or point lines)")
    for p in pts:
        t = tangent_complex(c, p)
        h = cohomology_dims(t)
        out.text(f"chart {c.name} at {_fmt_point(p)}")
        out.text("dims " + " ".join(map(str, t.dims)))
        out.rec("point", _fmt_point(p))
        out.rec("dims", *t.dims)
        for k, d in enumerate(t.differentials):
            out.text(f"d{k} : {t.dims[k]} -> {t.dims[k + 1]}")
            for line in _matrix_lines(d, t.dims[k + 1], t.dims[k]):
                out.text(line)
            for i, row in enumerate(d):
                out.rec(f"d{k}", i, *row)
        out.text("cohomology " + " ".join(map(str, h)))
        out.rec("cohomology", *h)
    return 0


def _weights(text: str | None):
    if not text:
        return None
    return {k: int(v) for k, v in parse_point(text).items()}


def cmd_cohomology(args, out: _Out) -> int:
    c = _load(args.files).chart(args.chart)
    spec = TruncationSpec(args.max_base_degree, args.window, args.weight, _weights(args.weights))
    res = bounded_cohomology(c, spec)
    out.text(f"chart {c.name}, base degree <= {args.max_base_degree}"
             + (f", weight {args.weight}" if args.weight is not None else ""))
    out.text("degree  h  stable")
    for k in sorted(res.dims, reverse=True):
        st = "yes" if k not in res.unstable_degrees else "no"
        out.text(f"{k:>6}  {res.dims[k]}  {st}")
        out.rec("h", k, res.dims[k], st)
    out.text("stable" if res.stable else "not stable: compare with a larger base degree")
    out.rec("stable", "true" if res.stable else "false")
    return 0


def cmd_koszul(args, out: _Out) -> int:
    c = _load(args.files).chart(args.chart)
    elems = args.element or []
    names = args.name or []
    if len(elems) != len(names):
        raise InputError("each --element needs a matching --name")
    res = koszul(c, list(zip(elems, names)), name=args.output_name or f"K_{c.name}")
    out.block(format_chart(res))
    return 0


def cmd_zero_locus(args, out: _Out) -> int:
    ws = _load(args.files)
    if args.section not in ws.sections:
        raise InputError(f"no section named {args.section!r}")
    s = ws.sections[args.section]
    out.block(format_chart(shifted_zero_locus(s, name=args.output_name)))
    return 0


def cmd_factorize(args, out: _Out) -> int:
    f = _load(args.files).map(args.map)
    res = factorize(f)
    out.block(format_chart(res.middle))
    for m in (res.q, res.r, res.phi):
        out.block("\n" + format_map(m))
    out.block("\n" + format_derivation(f"{f.name}_gamma", res.middle, res.gamma))
    return 0


def cmd_pullback(args, out: _Out) -> int:
    ws = _load(args.files)
    res = homotopy_pullback(ws.map(args.left), ws.map(args.right), name=args.output_name)
    out.block(format_chart(res.chart))
    out.block("\n" + format_map(res.to_left))
    out.block("\n" + format_map(res.to_right))
    return 0


def cmd_decompose(args, out: _Out) -> int:
    c = _load(args.files).chart(args.chart)
    tower, rebuilt, iso = decompose_roundtrip(c)
    first = True
    for chart, sec in tower:
        out.block(("" if first else "\n") + format_chart(chart))
        out.block("\n" + format_section(sec))
        first = False
    if tower:
        out.block("\n" + format_chart(rebuilt))
        out.block("\n" + format_map(iso.forward))
        out.block("\n" + format_map(iso.backward))
    else:
        out.text(f"# {c.name} has amplitude 0: empty tower")
        out.rec("tower", "empty")
    return 0


def cmd_weq(args, out: _Out) -> int:
    ws = _load(args.files)
    f = ws.map(args.map)
    pts = _points(args, ws)
    if not pts:
        raise InputError("no probes given (use --probes, --point or point lines)")
    res = is_pointwise_weq(f, pts)
    if res:
        out.text(f"map {f.name}: tangent quasi-isomorphism at all {len(pts)} probes")
        out.text("(classical loci are not compared)")
        out.rec("weq", "true", len(pts))
        return 0
    out.text(f"map {f.name}: not a weak equivalence")
    out.text(f"witness {_fmt_point(res.probe)}: {res.message}")
    out.rec("weq", "false", _fmt_point(res.probe), res.degree)
    return 1


def cmd_linfty_to_chart(args, out: _Out) -> int:
    ws = _load(args.files)
    if not ws.linfty:
        raise InputError("no linfty block in input")
    L = ws.linfty[args.linfty] if args.linfty else next(iter(ws.linfty.values()))
    chk = check_linfty(L)
    out.block(format_chart(to_dg_chart(L)))
    if chk:
        return 0
    out.text(f"# not an L-infinity structure: fails at arity {chk.arity} on {chk.generator}, "
             f"D(D({chk.generator})) = {chk.residue}")
    out.rec("linfty", "false", chk.arity, chk.generator)
    return 1


def cmd_chart_to_linfty(args, out: _Out) -> int:
    c = _load(args.files).chart(args.chart)
    out.block(format_linfty(from_dg_chart(c)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dgcalc", description="Exact computations with dg-charts.")
    ap.add_argument("--machine", action="store_true", help="line-oriented key<TAB>value output")
    ap.add_argument("--threads", type=int, default=None,
                    help=f"worker threads for probe and degree loops (env {parallel.THREADS_ENV})")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, chart=True):
        p = sub.add_parser(name, help=help_)
        p.add_argument("files", nargs="+", help="input files, loaded in order into one workspace")
        if chart:
            p.add_argument("--chart", help="chart name (default: first chart)")
        p.set_defaults(func=fn)
        return p

    add("validate", cmd_validate, "check D^2 = 0, degrees and chain conditions", chart=False)
    add("h0", cmd_h0, "presentation of H^0 (classical locus ideal)")
    for name, fn, h in (("classical", cmd_classical, "test points for classicality"),
                        ("tangent", cmd_tangent, "tangent complex at classical points")):
        p = add(name, fn, h)
        p.add_argument("--point", action="append", help='e.g. "x=1, y=1/2"')
        p.add_argument("--probes", action="append", help="file with point lines")
    p = add("cohomology", cmd_cohomology, "bounded-degree cohomology of the function algebra")
    p.add_argument("--max-base-degree", type=int, required=True)
    p.add_argument("--window", type=int, required=True, help="lowest cohomological degree")
    p.add_argument("--weight", type=int)
    p.add_argument("--weights", help='per-generator weights, e.g. "x=1, xi=2" (default 1)')
    p = add("koszul", cmd_koszul, "adjoin Koszul generators")
    p.add_argument("--element", action="append")
    p.add_argument("--name", action="append")
    p.add_argument("--as", dest="output_name")
    p = add("zero-locus", cmd_zero_locus, "shifted zero locus of a section", chart=False)
    p.add_argument("--section", required=True)
    p.add_argument("--as", dest="output_name")
    p = add("factorize", cmd_factorize, "path-object factorization of a map", chart=False)
    p.add_argument("--map")
    p = add("pullback", cmd_pullback, "homotopy pullback of two maps to a common chart", chart=False)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--as", dest="output_name")
    add("decompose", cmd_decompose, "tower of shifted zero loci")
    p = add("weq", cmd_weq, "pointwise tangent quasi-isomorphism test", chart=False)
    p.add_argument("--map")
    p.add_argument("--point", action="append")
    p.add_argument("--probes", action="append")
    p = add("linfty-to-chart", cmd_linfty_to_chart, "dual chart of L-infinity data", chart=False)
    p.add_argument("--linfty")
    add("chart-to-linfty", cmd_chart_to_linfty, "structure constants of a chart")
    return ap


def run(argv: list[str]) -> tuple[int, str, str]:
    """Run a command line; returns (exit code, stdout, stderr)."""
    ap = build_parser()
    out_, err = io.StringIO(), io.StringIO()
    try:
        with redirect_stdout(out_), redirect_stderr(err):
            args = ap.parse_args(argv)
    except SystemExit as e:
        return (2 if e.code else 0), out_.getvalue(), err.getvalue()
    out = _Out(args.machine)
    previous = parallel._threads
    parallel.set_threads(args.threads)
    try:
        code = args.func(args, out)
    except DgCalcError as e:
        kind = getattr(e, "kind", "error")
        msg = f"error: {kind}: {e}"
        out.rec("error", kind, str(e))
        return 2, out.buf.getvalue(), msg + "\n"
    finally:
        parallel.set_threads(previous)
    return code, out.buf.getvalue(), ""


def main(argv: list[str] | None = None) -> int:
    code, stdout, stderr = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(stdout)
    sys.stderr.write(stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
