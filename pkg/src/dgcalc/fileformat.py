"""Text format for charts, maps, points, sections, derivations and L-infinity data.

    chart <name>
    base <id> ...
    gen <id> : <negative int>
    d <id> = <poly>                      # omitted means D = 0

    map <name> : <source> -> <target>
    send <id> = <poly over source>       # omitted means 0

    point <id>=<rational>, ...

    section <name> over <chart>
    slot <id> : <int <= 0> = <poly>

    derivation <name> on <chart> : <int>
    value <id> = <poly>

    linfty <name>
    base <id> ...
    elem <id> : <positive int>
    bracket <out> <= <in> ... : <poly over base>

A block runs until the next header.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .chart import DgChart, DgMorphism, check_morphism, validate_chart
from .derivation import Derivation
from .derived import Section
from .errors import (ChainConditionError, CohomologicalError, DegreeError, InputError,
                     NameClashError, ParseError,
                     UnknownIdentifierError)
from .expr import parse_polynomial
from .graded_poly import GradedPolynomial, format_polynomial
from .linfty import CurvedLInftyChart

_ID = r"[A-Za-z_][A-Za-z0-9_]*"
_RAT = r"-?\d+(?:/\d+)?"


@dataclass
class Workspace:
    charts: dict[str, DgChart] = field(default_factory=dict)
    maps: dict[str, DgMorphism] = field(default_factory=dict)
    sections: dict[str, Section] = field(default_factory=dict)
    derivations: dict[str, tuple[str, Derivation]] = field(default_factory=dict)
    linfty: dict[str, CurvedLInftyChart] = field(default_factory=dict)
    points: list[dict[str, Fraction]] = field(default_factory=list)

    def names(self) -> set[str]:
        return (set(self.charts) | set(self.maps) | set(self.sections) | set(self.derivations)
                | set(self.linfty))

    def chart(self, name: str | None = None) -> DgChart:
        if name is None:
            if not self.charts:
                raise InputError("no chart in input")
            return next(iter(self.charts.values()))
        if name not in self.charts:
            raise UnknownIdentifierError(f"no chart named {name!r}")
        return self.charts[name]

    def map(self, name: str | None = None) -> DgMorphism:
        if name is None:
            if not self.maps:
                raise InputError("no map in input")
            return next(iter(self.maps.values()))
        if name not in self.maps:
            raise UnknownIdentifierError(f"no map named {name!r}")
        return self.maps[name]


class _Line:
    def __init__(self, number: int, text: str):
        self.number = number
        self.text = text

    def fail(self, cls, message, column=None):
        return cls(message, self.number, column)


def _strip_comment(text: str) -> str:
    i = text.find("#")
    return text if i < 0 else text[:i]


class _Block:
    def __init__(self, kind: str, header: _Line, name: str):
        self.kind = kind
        self.header = header
        self.name = name
        self.lines: list[tuple[str, re.Match, _Line]] = []


_HEADERS = {
    "chart": re.compile(rf"\s*chart\s+({_ID})\s*$"),
    "map": re.compile(rf"\s*map\s+({_ID})\s*:\s*({_ID})\s*->\s*({_ID})\s*$"),
    "section": re.compile(rf"\s*section\s+({_ID})\s+over\s+({_ID})\s*$"),
    "derivation": re.compile(rf"\s*derivation\s+({_ID})\s+on\s+({_ID})\s*:\s*(-?\d+)\s*$"),
    "linfty": re.compile(rf"\s*linfty\s+({_ID})\s*$"),
}
_BODY = {
    "chart": {
        "base": re.compile(rf"\s*base((?:\s+{_ID})*)\s*$"),
        "gen": re.compile(rf"\s*gen\s+({_ID})\s*:\s*(-?\d+)\s*$"),
        "d": re.compile(rf"\s*d\s+({_ID})\s*=(.*)$"),
    },
    "map": {"send": re.compile(rf"\s*send\s+({_ID})\s*=(.*)$")},
    "section": {"slot": re.compile(rf"\s*slot\s+({_ID})\s*:\s*(-?\d+)\s*=(.*)$")},
    "derivation": {"value": re.compile(rf"\s*value\s+({_ID})\s*=(.*)$")},
    "linfty": {
        "base": re.compile(rf"\s*base((?:\s+{_ID})*)\s*$"),
        "elem": re.compile(rf"\s*elem\s+({_ID})\s*:\s*(-?\d+)\s*$"),
        "bracket": re.compile(rf"\s*bracket\s+({_ID})\s*<=((?:\s+{_ID})*)\s*:(.*)$"),
    },
}
_POINT = re.compile(r"\s*point\b(.*)$")
_ASSIGN = re.compile(rf"\s*({_ID})\s*=\s*({_RAT})\s*$")


def parse_point(text: str, line: _Line | None = None) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    body = text.strip()
    if not body:
        return out
    for part in body.split(","):
        m = _ASSIGN.match(part)
        if not m:
            err = ParseError(f"bad point assignment {part.strip()!r}; expected <id>=<rational>")
            raise err.at(line.number) if line else err
        if m.group(1) in out:
            err = ParseError(f"{m.group(1)} assigned twice")
            raise err.at(line.number) if line else err
        num, _, den = m.group(2).partition("/")
        if den and int(den) == 0:
            err = ParseError("zero denominator")
            raise err.at(line.number) if line else err
        out[m.group(1)] = Fraction(int(num), int(den or 1))
    return out


def _poly(text: str, universe, line: _Line, start: int) -> GradedPolynomial:
    if not text.strip():
        raise line.fail(ParseError, "missing expression", start + 1)
    try:
        return parse_polynomial(text, universe, column_offset=start)
    except InputError as e:
        raise e.at(line.number)


def parse_text(text: str, workspace: Workspace | None = None, validate: bool = True) -> Workspace:
    """Parse a file into ``workspace`` (a fresh one by default).

    With ``validate`` false, charts and maps are registered even when D^2 or
    the chain condition fails, so that they can be diagnosed.
    """
    ws = workspace if workspace is not None else Workspace()
    blocks: list[_Block] = []
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(number, raw)
        body = _strip_comment(raw)
        if not body.strip():
            continue
        m = _POINT.match(body)
        if m:
            ws.points.append(parse_point(m.group(1), line))
            continue
        for kind, rx in _HEADERS.items():
            m = rx.match(body)
            if m:
                current = _Block(kind, line, m.group(1))
                current.match = m
                blocks.append(current)
                break
        else:
            if current is None:
                word = body.split()[0]
                raise line.fail(ParseError, f"{word!r} outside of a block", body.find(word) + 1)
            for key, rx in _BODY[current.kind].items():
                m = rx.match(body)
                if m:
                    current.lines.append((key, m, line))
                    break
            else:
                word = body.split()[0]
                col = body.find(word) + 1
                if word in _BODY[current.kind]:
                    raise line.fail(ParseError, f"malformed {word!r} line", col)
                raise line.fail(ParseError, f"unexpected {word!r} in {current.kind} block", col)
    for b in blocks:
        if b.name in ws.names():
            raise b.header.fail(NameClashError, f"name {b.name!r} is already defined", None)
        _BUILDERS[b.kind](b, ws, validate)
    return ws


def _build_chart(b: _Block, ws: Workspace, validate: bool):
    base, fibers, dlines = [], [], []
    seen = set()
    for key, m, line in b.lines:
        if key == "base":
            for name in m.group(1).split():
                if name in seen:
                    raise line.fail(NameClashError, f"generator {name!r} declared twice",
                                    line.text.find(name) + 1)
                seen.add(name)
                base.append(name)
        elif key == "gen":
            name, deg = m.group(1), int(m.group(2))
            if name in seen:
                raise line.fail(NameClashError, f"generator {name!r} declared twice", m.start(1) + 1)
            if deg >= 0:
                raise line.fail(DegreeError, f"gen {name} has degree {deg}; fiber degrees must be "
                                "negative (declare degree-0 variables with 'base')", m.start(2) + 1)
            seen.add(name)
            fibers.append((name, deg))
        else:
            dlines.append((m, line))
    chart = DgChart(b.name, base, fibers, {}, validate=False)
    D = {}
    for m, line in dlines:
        g = m.group(1)
        if g not in seen:
            raise line.fail(UnknownIdentifierError, f"d for undeclared generator {g!r}", m.start(1) + 1)
        if g in D:
            raise line.fail(ParseError, f"second d line for {g!r}", m.start(1) + 1)
        D[g] = _poly(m.group(2), chart.universe, line, m.start(2))
    chart = DgChart(b.name, base, fibers, D, validate=False)
    if validate:
        diag = validate_chart(chart)
        if not diag:
            cls = CohomologicalError if diag.kind == "D^2 failure" else DegreeError
            line = next((l for m, l in dlines if m.group(1) == diag.generator), b.header)
            raise line.fail(cls, f"chart {b.name}: {diag.message}", None)
    ws.charts[b.name] = chart


def _lookup_chart(ws: Workspace, name: str, line: _Line, col: int) -> DgChart:
    if name not in ws.charts:
        raise line.fail(UnknownIdentifierError, f"unknown chart {name!r}", col)
    return ws.charts[name]


def _build_map(b: _Block, ws: Workspace, validate: bool):
    hm = b.match
    src = _lookup_chart(ws, hm.group(2), b.header, hm.start(2) + 1)
    tgt = _lookup_chart(ws, hm.group(3), b.header, hm.start(3) + 1)
    images = {}
    lines = {}
    for _, m, line in b.lines:
        g = m.group(1)
        if g not in tgt.universe:
            raise line.fail(UnknownIdentifierError, f"{g!r} is not a generator of {tgt.name}",
                            m.start(1) + 1)
        if g in images:
            raise line.fail(ParseError, f"second send line for {g!r}", m.start(1) + 1)
        images[g] = _poly(m.group(2), src.universe, line, m.start(2))
        lines[g] = line
    f = DgMorphism(b.name, src, tgt, images, validate=False)
    if validate:
        diag = check_morphism(f)
        if not diag:
            cls = DegreeError if diag.kind == "degree violation" else ChainConditionError
            raise lines.get(diag.generator, b.header).fail(cls, f"map {b.name}: {diag.message}", None)
    ws.maps[b.name] = f


def _build_section(b: _Block, ws: Workspace, validate: bool):
    hm = b.match
    chart = _lookup_chart(ws, hm.group(2), b.header, hm.start(2) + 1)
    slots, comps = [], {}
    for _, m, line in b.lines:
        name, deg = m.group(1), int(m.group(2))
        if deg > 0:
            raise line.fail(DegreeError, f"slot {name} has positive degree {deg}", m.start(2) + 1)
        if name in comps:
            raise line.fail(NameClashError, f"slot {name!r} declared twice", m.start(1) + 1)
        slots.append((name, deg))
        comps[name] = _poly(m.group(3), chart.universe, line, m.start(3))
    try:
        ws.sections[b.name] = Section(chart, slots, comps, name=b.name)
    except InputError as e:
        raise e.at(b.header.number)


def _build_derivation(b: _Block, ws: Workspace, validate: bool):
    hm = b.match
    chart = _lookup_chart(ws, hm.group(2), b.header, hm.start(2) + 1)
    vals = {}
    for _, m, line in b.lines:
        g = m.group(1)
        if g not in chart.universe:
            raise line.fail(UnknownIdentifierError, f"{g!r} is not a generator of {chart.name}",
                            m.start(1) + 1)
        vals[g] = _poly(m.group(2), chart.universe, line, m.start(2))
    ws.derivations[b.name] = (chart.name, Derivation(chart.universe, int(hm.group(3)), vals))


def _build_linfty(b: _Block, ws: Workspace, validate: bool):
    base, elems, brackets = [], [], []
    for key, m, line in b.lines:
        if key == "base":
            base.extend(m.group(1).split())
        elif key == "elem":
            deg = int(m.group(2))
            if deg < 1:
                raise line.fail(DegreeError, f"elem {m.group(1)} has degree {deg}; must be >= 1",
                                m.start(2) + 1)
            elems.append((m.group(1), deg))
        else:
            brackets.append((m, line))
    try:
        L0 = CurvedLInftyChart(b.name, base, elems, [])
    except InputError as e:
        raise e.at(b.header.number)
    parsed = []
    for m, line in brackets:
        coeff = _poly(m.group(3), L0.base_universe, line, m.start(3))
        try:
            L0._normalize(m.group(1), m.group(2).split())
        except InputError as e:
            raise e.at(line.number, m.start(1) + 1)
        parsed.append((m.group(1), m.group(2).split(), coeff))
    L = CurvedLInftyChart(b.name, base, elems, parsed)
    ws.linfty[b.name] = L


_BUILDERS = {
    "chart": _build_chart,
    "map": _build_map,
    "section": _build_section,
    "derivation": _build_derivation,
    "linfty": _build_linfty,
}


def parse_chart(text: str) -> DgChart:
    """The first chart of a chart file, validated."""
    return parse_text(text).chart()


# -- printing --------------------------------------------------------------

def format_chart(c: DgChart) -> str:
    out = [f"chart {c.name}"]
    if c.base:
        out.append("base " + " ".join(c.base))
    for n, d in c.fibers:
        out.append(f"gen {n} : {d}")
    for g in c.generators:
        p = c.d(g)
        if p:
            out.append(f"d {g} = {format_polynomial(p)}")
    return "\n".join(out) + "\n"


def format_map(f: DgMorphism) -> str:
    out = [f"map {f.name} : {f.source.name} -> {f.target.name}"]
    for g in f.target.generators:
        out.append(f"send {g} = {format_polynomial(f.images[g])}")
    return "\n".join(out) + "\n"


def format_point(p: dict) -> str:
    return "point " + ", ".join(f"{k}={v}" for k, v in p.items())


def format_section(s: Section) -> str:
    out = [f"section {s.name} over {s.chart.name}"]
    for n, d in s.slots:
        out.append(f"slot {n} : {d} = {format_polynomial(s.components[n])}")
    return "\n".join(out) + "\n"


def format_derivation(name: str, chart: DgChart, X: Derivation) -> str:
    out = [f"derivation {name} on {chart.name} : {X.degree}"]
    for g in chart.generators:
        p = X.value(g)
        if p:
            out.append(f"value {g} = {format_polynomial(p)}")
    return "\n".join(out) + "\n"


def format_linfty(L: CurvedLInftyChart) -> str:
    out = [f"linfty {L.name}"]
    if L.base:
        out.append("base " + " ".join(L.base))
    for e, k in L.elements:
        out.append(f"elem {e} : {k}")
    order = {e: i for i, (e, _) in enumerate(L.elements)}
    for (o, ins), coeff in sorted(L.brackets.items(), key=lambda kv: (order[kv[0][0]], len(kv[0][1]),
                                                                      kv[0][1])):
        lhs = f"bracket {o} <=" + "".join(f" {i}" for i in ins)
        out.append(f"{lhs} : {format_polynomial(coeff)}")
    return "\n".join(out) + "\n"
