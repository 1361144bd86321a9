"""Dg-charts in split global coordinates and their morphisms."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .derivation import Derivation, is_cohomological
from .errors import (ChainConditionError, CohomologicalError, DegreeError, NameClashError,
                     NonClassicalPointError,
                     UniverseMismatchError)
from .expr import parse_polynomial
from .graded_poly import (GradedPolynomial, GradedVariable, Universe, evaluate_at_core, has_degree,
                          homogeneous_degree, left_partial)
from .linalg import rank
from .parallel import ordered_map

Point = Mapping[str, Fraction]


def _as_poly(value, universe: Universe) -> GradedPolynomial:
    if isinstance(value, GradedPolynomial):
        if value.universe != universe:
            raise UniverseMismatchError("polynomial lives in another universe")
        return value
    if isinstance(value, (int, Fraction)):
        return universe.const(value)
    return parse_polynomial(str(value), universe)


def restrict(p: GradedPolynomial, universe: Universe) -> GradedPolynomial:
    """View ``p`` in a smaller universe containing every variable it uses."""
    names = p.universe.names
    pos = {i: universe.index(names[i]) for i in range(len(names))
           if names[i] in universe}
    n = len(universe)
    out = {}
    for e, c in p.items():
        ne = [0] * n
        for i, k in enumerate(e):
            if k:
                if i not in pos:
                    raise UniverseMismatchError(f"{names[i]} is not in the smaller universe")
                ne[pos[i]] = k
        out[tuple(ne)] = c
    return GradedPolynomial(universe, out)


@dataclass(frozen=True)
class Diagnostic:
    ok: bool
    kind: str = ""
    generator: str | None = None
    message: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "ok" if self.ok else f"{self.kind}: {self.message}"


OK = Diagnostic(True)


class DgChart:
    """Base variables, negatively graded fiber variables and a degree +1 field D.

    ``differential`` maps generator names to polynomials (or expression
    strings); generators left out have D = 0.  Equality compares the
    variable set and D, not the name or declaration order.
    """

    def __init__(self, name: str, base: Sequence[str], fibers: Sequence[tuple[str, int]],
                 differential: Mapping[str, object] | Derivation = (), validate: bool = True):
        base = tuple(base)
        fibers = tuple((n, int(d)) for n, d in fibers)
        for n, d in fibers:
            if d >= 0:
                raise DegreeError(f"fiber generator {n} has degree {d}; fiber degrees must be <= -1")
        variables = [GradedVariable(b, 0) for b in base] + [GradedVariable(n, d) for n, d in fibers]
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise NameClashError(f"chart {name}: repeated generator names {', '.join(dup)}")
        self.name = name
        self.base = base
        self.fibers = fibers
        self.universe = Universe(variables)
        if isinstance(differential, Derivation):
            if differential.universe != self.universe:
                raise UniverseMismatchError("differential lives in another universe")
            self.D = differential
        else:
            vals = {k: _as_poly(v, self.universe) for k, v in dict(differential).items()}
            self.D = Derivation(self.universe, 1, vals)
        if validate:
            diag = validate_chart(self)
            if not diag:
                err = CohomologicalError if diag.kind == "D^2 failure" else DegreeError
                raise err(f"chart {name}: {diag.message}")

    @property
    def generators(self) -> tuple[str, ...]:
        return self.base + tuple(n for n, _ in self.fibers)

    @property
    def amplitude(self) -> int:
        return max((-d for _, d in self.fibers), default=0)

    def degree_of(self, name: str) -> int:
        return self.universe.degree_of(name)

    def fibers_of_degree(self, degree: int) -> tuple[str, ...]:
        return tuple(n for n, d in self.fibers if d == degree)

    def generators_of_degree(self, degree: int) -> tuple[str, ...]:
        return self.base if degree == 0 else self.fibers_of_degree(degree)

    def d(self, name: str) -> GradedPolynomial:
        return self.D.value(name)

    def var(self, name: str) -> GradedPolynomial:
        return self.universe.var(name)

    def poly(self, text) -> GradedPolynomial:
        return _as_poly(text, self.universe)

    def renamed(self, name: str) -> "DgChart":
        return DgChart(name, self.base, self.fibers, self.D, validate=False)

    def __eq__(self, other):
        return isinstance(other, DgChart) and self.universe == other.universe and self.D == other.D

    def __hash__(self):
        return hash((self.universe, self.D))

    def __repr__(self):
        return f"DgChart({self.name!r}, base={list(self.base)}, fibers={list(self.fibers)})"


def validate_chart(c: DgChart) -> Diagnostic:
    if c.D.degree != 1:
        return Diagnostic(False, "degree violation", None, f"D has degree {c.D.degree}, expected 1")
    for g in c.generators:
        p = c.D.value(g)
        want = c.degree_of(g) + 1
        if not has_degree(p, want):
            return Diagnostic(False, "degree violation", g,
                              f"D({g}) = {p} has degree {homogeneous_degree(p)}, expected {want}")
    check = is_cohomological(c.D)
    if not check:
        return Diagnostic(False, "D^2 failure", check.generator,
                          f"D(D({check.generator})) = {check.residue}, expected 0")
    return OK


class DgMorphism:
    """Chart map given by the pullback of each target generator.

    ``images`` sends target generator names to polynomials over the source;
    missing generators pull back to zero.
    """

    def __init__(self, name: str, source: DgChart, target: DgChart,
                 images: Mapping[str, object], validate: bool = True):
        self.name = name
        self.source = source
        self.target = target
        imgs = {}
        for k, v in dict(images).items():
            if k not in target.universe:
                raise UniverseMismatchError(f"map {name}: {k} is not a generator of {target.name}")
            imgs[k] = _as_poly(v, source.universe)
        self.images = {g: imgs.get(g, source.universe.zero()) for g in target.generators}
        if validate:
            diag = check_morphism(self)
            if not diag:
                err = DegreeError if diag.kind == "degree violation" else ChainConditionError
                raise err(f"map {name}: {diag.message}")

    def pullback(self, p: GradedPolynomial) -> GradedPolynomial:
        return p.substitute(self.images, self.source.universe)

    def map_point(self, point: Point) -> dict[str, Fraction]:
        return {b: evaluate_at_core(self.images[b], point) for b in self.target.base}

    def __eq__(self, other):
        return (isinstance(other, DgMorphism) and self.source == other.source
                and self.target == other.target and self.images == other.images)

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.images.items())))

    def __repr__(self):
        return f"DgMorphism({self.name!r}: {self.source.name} -> {self.target.name})"


def check_morphism(f: DgMorphism) -> Diagnostic:
    for g in f.target.generators:
        img = f.images[g]
        if not has_degree(img, f.target.degree_of(g)):
            return Diagnostic(False, "degree violation", g,
                              f"image of {g} = {img} has degree {homogeneous_degree(img)}, "
                              f"expected {f.target.degree_of(g)}")
    for g in f.target.generators:
        lhs = f.pullback(f.target.d(g))
        rhs = f.source.D(f.images[g])
        if lhs != rhs:
            return Diagnostic(False, "chain condition", g,
                              f"on {g}: pullback of D({g}) is {lhs} but D(image) is {rhs}")
    return OK


def identity(c: DgChart, name: str | None = None) -> DgMorphism:
    return DgMorphism(name or f"id_{c.name}", c, c, {g: c.var(g) for g in c.generators},
                      validate=False)


def compose(g: DgMorphism, f: DgMorphism, name: str | None = None) -> DgMorphism:
    """Composite with pullback g* after f*: requires ``f.source == g.target``."""
    if f.source != g.target:
        raise UniverseMismatchError(f"cannot compose: {f.name} starts at {f.source.name}, "
                                    f"{g.name} ends at {g.target.name}")
    images = {v: g.pullback(p) for v, p in f.images.items()}
    return DgMorphism(name or f"{g.name}*{f.name}", g.source, f.target, images, validate=False)


Rename = Mapping[str, str] | Callable[[str], str] | None


def _renamer(rename: Rename) -> Callable[[str], str]:
    if rename is None:
        return lambda n: n
    if callable(rename):
        return rename
    return lambda n: rename.get(n, n)


def rename_chart(c: DgChart, rename: Rename, name: str | None = None) -> DgChart:
    r = _renamer(rename)
    base = [r(b) for b in c.base]
    fibers = [(r(n), d) for n, d in c.fibers]
    tmp = DgChart(name or c.name, base, fibers, {}, validate=False)
    images = {g: tmp.var(r(g)) for g in c.generators}
    D = {r(g): c.d(g).substitute(images, tmp.universe) for g in c.generators}
    return DgChart(tmp.name, base, fibers, D, validate=False)


@dataclass
class ProductResult:
    chart: DgChart
    first: DgMorphism
    second: DgMorphism


def product_with_projections(a: DgChart, b: DgChart, rename: Rename = None,
                             name: str | None = None) -> ProductResult:
    """Product chart and its two projections; ``rename`` is applied to ``b``'s generators."""
    b2 = rename_chart(b, rename) if rename is not None else b
    clash = set(a.generators) & set(b2.generators)
    if clash:
        raise NameClashError(f"product {a.name} x {b.name}: shared names {', '.join(sorted(clash))}")
    base = a.base + b2.base
    fibers = a.fibers + b2.fibers
    tmp = DgChart(name or f"{a.name}_x_{b.name}", base, fibers, {}, validate=False)
    D = {}
    for part in (a, b2):
        for g in part.generators:
            D[g] = part.d(g).embed(tmp.universe)
    chart = DgChart(tmp.name, base, fibers, D, validate=False)
    r = _renamer(rename)
    pr_a = DgMorphism(f"pr_{a.name}", chart, a, {g: chart.var(g) for g in a.generators}, validate=False)
    pr_b = DgMorphism(f"pr_{b.name}", chart, b, {g: chart.var(r(g)) for g in b.generators},
                      validate=False)
    return ProductResult(chart, pr_a, pr_b)


def product(a: DgChart, b: DgChart, rename: Rename = None, name: str | None = None) -> DgChart:
    return product_with_projections(a, b, rename, name).chart


def point_chart(name: str = "point") -> DgChart:
    return DgChart(name, [], [], {})


@dataclass(frozen=True)
class IdealPresentation:
    """Ideal of the base polynomial ring, given by generators; H0 = ring / ideal."""

    ambient: tuple[str, ...]
    universe: Universe
    generators: tuple[GradedPolynomial, ...] = field(default=())

    def vanishes_at(self, point: Point) -> bool:
        return all(evaluate_at_core(g, point) == 0 for g in self.generators)


def base_universe(c: DgChart) -> Universe:
    return Universe(GradedVariable(b, 0) for b in c.base)


def classical_locus_ideal(c: DgChart) -> IdealPresentation:
    bu = base_universe(c)
    gens = tuple(restrict(c.d(n), bu) for n in c.fibers_of_degree(-1))
    return IdealPresentation(c.base, bu, gens)


def is_classical_point(c: DgChart, point: Point) -> bool:
    return all(evaluate_at_core(c.d(n), point) == 0 for n in c.fibers_of_degree(-1))


def linearize(f: DgMorphism, point: Point) -> dict[int, list[list[Fraction]]]:
    """Per degree k >= 0, the matrix of linear coefficients of the degree -k images.

    Rows are target generators, columns source generators of degree -k.  For
    k = 0 this is the Jacobian of the base images.
    """
    src, tgt = f.source, f.target
    top = max(src.amplitude, tgt.amplitude)
    out = {}
    for k in range(top + 1):
        rows = tgt.generators_of_degree(-k)
        cols = src.generators_of_degree(-k)
        out[k] = [[linear_coefficient(f.images[t], s, point) for s in cols] for t in rows]
    return out


def linear_coefficient(p: GradedPolynomial, s: str, point: Point) -> Fraction:
    """Coefficient of ``s`` in the linearization of ``p`` at ``point``.

    For a base variable this is the partial derivative at the point; for a
    fiber variable it is the base-evaluated coefficient of the monomials whose
    only fiber factor is ``s``.
    """
    u = p.universe
    i = u.index(s)
    if u.variables[i].degree == 0:
        return evaluate_at_core(left_partial(p, s), point)
    fib = [j for j, v in enumerate(u.variables) if v.degree < 0]
    lin = {}
    for e, c in p.items():
        if e[i] == 1 and all(e[j] == 0 for j in fib if j != i):
            lin[e] = c
    q = GradedPolynomial(u, lin)
    return evaluate_at_core(left_partial(q, s), point)


def _full_row_rank(m: list[list[Fraction]]) -> bool:
    return rank(m) == len(m)


@dataclass(frozen=True)
class ProbeCheck:
    ok: bool
    probe: dict | None = None
    degree: int | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def require_classical(c: DgChart, point: Point) -> None:
    if not is_classical_point(c, point):
        raise NonClassicalPointError(f"point {format_point(point)} is not classical in {c.name}")


def format_point(point: Point) -> str:
    return ", ".join(f"{k}={v}" for k, v in point.items())


def is_fibration_at(f: DgMorphism, probes: Sequence[Point]) -> ProbeCheck:
    for p in probes:
        require_classical(f.source, p)

    def at(p):
        for k, m in sorted(linearize(f, p).items()):
            if not _full_row_rank(m):
                part = "base Jacobian" if k == 0 else f"degree -{k} fiber part"
                return k, f"{part} is not surjective at {format_point(p)}"
        return None

    for p, bad in zip(probes, ordered_map(at, probes)):
        if bad is not None:
            return ProbeCheck(False, dict(p), bad[0], bad[1])
    return ProbeCheck(True)
