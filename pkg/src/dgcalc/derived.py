"""Derived zero loci, path-object factorization, homotopy pullbacks, decomposition.

Factorization of a chart map f: M -> N (pullback f*: O(N) -> O(M), x_i -> p_i).
The middle chart P is free on the generators y of M, copies x of the
generators of N and companions xbar_i of degree |x_i| - 1.  It comes with

    q:   P -> N   x_i -> x_i              (pullback includes O(N))
    r:   M -> P   x_i -> p_i, xbar -> 0   (a section of phi)
    phi: P -> M   y -> y                  (the trivial fibration)

and the degree -1 derivation Gamma = xbar_i d/dx_i.

D(xbar) is obtained from an automorphism of a cylinder algebra rather than
from a first-order Taylor formula, because the first-order formula only
squares to zero when the differential of N is affine.  Let C be free on
x, xbar, z (|z_i| = |x_i|) with D(x) = D_N(x), D(xbar) = z, D(z) = 0, and let
i be the odd derivation x -> xbar.  theta = [D, i] commutes with D and is
locally nilpotent, so Phi = exp(theta) is a dg-automorphism of C and
Phi(x_k) = x_k + z_k + R_k where R_k only involves z_l with |z_l| > |z_k|, each
multiplied by some xbar.  Solving for z_k and sending Phi(x_k) to p_k gives
D(xbar_k).  When D_N is affine this is p_k - x_k - xbar_l d(D_N x_k)/dx_l.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .chart import (DgChart, DgMorphism, Rename, _as_poly, _renamer, compose, identity,
                    rename_chart)
from .derivation import Derivation, apply, commutator
from .errors import CohomologicalError, DegreeError, NameClashError
from .graded_poly import GradedPolynomial, GradedVariable, Universe, has_degree, homogeneous_degree
from .koszul import koszul


class Section:
    """Section of a trivial graded bundle over a chart.

    ``slots`` are the bundle generators with their degrees (<= 0);
    ``components`` gives each slot's component, homogeneous of the slot's
    degree and D-closed.
    """

    def __init__(self, chart: DgChart, slots: Sequence[tuple[str, int]],
                 components: Mapping[str, object], name: str | None = None):
        self.chart = chart
        self.name = name or f"s_{chart.name}"
        self.slots = tuple((n, int(d)) for n, d in slots)
        names = [n for n, _ in self.slots]
        if len(set(names)) != len(names):
            raise NameClashError(f"section {self.name}: repeated slot names")
        unknown = set(components) - set(names)
        if unknown:
            raise NameClashError(f"section {self.name}: components for unknown slots "
                                 f"{', '.join(sorted(unknown))}")
        comps = {}
        for n, d in self.slots:
            if d > 0:
                raise DegreeError(f"section {self.name}: slot {n} has positive degree {d}")
            p = _as_poly(components.get(n, 0), chart.universe)
            if not has_degree(p, d):
                raise DegreeError(f"section {self.name}: component on {n} has degree "
                                  f"{homogeneous_degree(p)}, expected {d}")
            if chart.D(p):
                raise CohomologicalError(f"section {self.name}: component on {n} is not D-closed")
            comps[n] = p
        self.components = comps

    def __eq__(self, other):
        return (isinstance(other, Section) and self.chart == other.chart
                and self.slots == other.slots and self.components == other.components)

    def __repr__(self):
        return f"Section({self.name!r} over {self.chart.name}, slots={list(self.slots)})"


def shifted_zero_locus(s: Section, name: str | None = None) -> DgChart:
    return koszul(s.chart, [(s.components[n], n, d) for n, d in s.slots],
                  name=name or f"Z_{s.name}")


# -- factorization ---------------------------------------------------------

def _fresh(base: str, used: set[str]) -> str:
    name, i = base, 2
    while name in used:
        name = f"{base}_{i}"
        i += 1
    used.add(name)
    return name


@dataclass
class FactorizationResult:
    middle: DgChart
    q: DgMorphism
    r: DgMorphism
    phi: DgMorphism
    gamma: Derivation
    copies: dict[str, str]
    bars: dict[str, str]
    solved: dict[str, GradedPolynomial]

    @property
    def trivial_fibration(self) -> DgMorphism:
        return self.phi


def _exp_derivation(theta: Derivation, p: GradedPolynomial, limit: int = 10000) -> GradedPolynomial:
    total, term = p, p
    for n in range(1, limit):
        term = apply(theta, term).scale(Fraction(1, n))
        if not term:
            return total
        total = total + term
    raise RuntimeError("derivation is not locally nilpotent on this element")


def _solve_cylinder(N: DgChart, copies: dict[str, str], bars: dict[str, str],
                    images: dict[str, GradedPolynomial], target: Universe) -> dict[str, GradedPolynomial]:
    """D(xbar_k) as polynomials in ``target`` given the images p_k of x_k there."""
    used = set(copies.values()) | set(bars.values()) | set(target.names)
    zs = {g: _fresh(f"_z_{g}", used) for g in N.generators}
    W = Universe([GradedVariable(copies[g], N.degree_of(g)) for g in N.generators]
                 + [GradedVariable(bars[g], N.degree_of(g) - 1) for g in N.generators]
                 + [GradedVariable(zs[g], N.degree_of(g)) for g in N.generators])
    to_W = {g: W.var(copies[g]) for g in N.generators}
    DW = {copies[g]: N.d(g).substitute(to_W, W) for g in N.generators}
    DW.update({bars[g]: W.var(zs[g]) for g in N.generators})
    D = Derivation(W, 1, DW)
    i = Derivation(W, -1, {copies[g]: W.var(bars[g]) for g in N.generators})
    theta = commutator(D, i)

    subst = {copies[g]: target.var(copies[g]) for g in N.generators}
    subst.update({bars[g]: target.var(bars[g]) for g in N.generators})
    solved = {}
    for g in sorted(N.generators, key=lambda g: -N.degree_of(g)):
        rest = _exp_derivation(theta, W.var(copies[g])) - W.var(copies[g]) - W.var(zs[g])
        leftover = rest.variables_used() & (set(zs.values()) - {zs[h] for h in solved})
        if leftover:
            raise AssertionError(f"cylinder solve is not triangular at {g}: {sorted(leftover)}")
        z = images[g] - target.var(copies[g]) - rest.substitute(subst, target)
        solved[g] = z
        subst[zs[g]] = z
    return solved


def factorize(f: DgMorphism, rename: Rename = None, reserved: Sequence[str] = (),
              name: str | None = None) -> FactorizationResult:
    """Factor ``f: M -> N`` as M -r-> P -q-> N with phi: P -> M retracting r.

    Generators of N keep their names unless they clash with M (or with
    ``reserved``), in which case they get a numeric suffix; ``rename`` may
    choose the copies' names explicitly.  Companions are named ``<copy>_bar``.
    """
    M, N = f.source, f.target
    r_name = _renamer(rename)
    used = set(M.generators) | set(reserved)
    copies = {}
    for g in N.generators:
        copies[g] = _fresh(r_name(g), used)
    bars = {g: _fresh(f"{copies[g]}_bar", used) for g in N.generators}

    base = M.base + tuple(copies[g] for g in N.base)
    fibers = (M.fibers + tuple((copies[g], d) for g, d in N.fibers)
              + tuple((bars[g], N.degree_of(g) - 1) for g in N.generators))
    P0 = DgChart(name or f"P_{f.name}", base, fibers, {}, validate=False)
    U = P0.universe
    p = {g: f.images[g].embed(U) for g in N.generators}
    solved = _solve_cylinder(N, copies, bars, p, U)
    to_U = {g: U.var(copies[g]) for g in N.generators}
    D = {y: M.d(y).embed(U) for y in M.generators}
    D.update({copies[g]: N.d(g).substitute(to_U, U) for g in N.generators})
    D.update({bars[g]: solved[g] for g in N.generators})
    P = DgChart(P0.name, base, fibers, D)

    q = DgMorphism(f"{f.name}_q", P, N, {g: P.var(copies[g]) for g in N.generators})
    r_images = {copies[g]: f.images[g] for g in N.generators}
    r_images.update({y: M.var(y) for y in M.generators})
    r = DgMorphism(f"{f.name}_r", M, P, r_images)
    phi = DgMorphism(f"{f.name}_phi", P, M, {y: P.var(y) for y in M.generators})
    gamma = Derivation(U, -1, {copies[g]: U.var(bars[g]) for g in N.generators})
    return FactorizationResult(P, q, r, phi, gamma, copies, bars, solved)


def homotopy_defect(res: FactorizationResult) -> dict[str, GradedPolynomial]:
    """[D, Gamma](v) - (phi r)*(v) + v on each generator of the middle chart."""
    bracket = commutator(res.middle.D, res.gamma)
    phir = compose(res.phi, res.r)
    out = {}
    for v in res.middle.generators:
        out[v] = bracket.value(v) - (phir.images[v] - res.middle.var(v))
    return out


def homotopy_identity_holds(res: FactorizationResult) -> bool:
    return not any(homotopy_defect(res).values())


# -- homotopy pullback -----------------------------------------------------

@dataclass
class PullbackResult:
    chart: DgChart
    to_left: DgMorphism
    to_right: DgMorphism
    to_middle: DgMorphism
    factorization: FactorizationResult


def homotopy_pullback(f: DgMorphism, g: DgMorphism, name: str | None = None) -> PullbackResult:
    """Pullback of ``f: L -> N`` and ``g: M -> N`` after replacing g by a fibration.

    Generators of M that clash with L get a numeric suffix.
    """
    L, M, N = f.source, g.source, f.target
    if g.target != N:
        raise NameClashError(f"{f.name} and {g.name} have different targets")
    used = set(L.generators)
    m_names = {y: _fresh(y, used) for y in M.generators}
    if any(k != v for k, v in m_names.items()):
        M2 = rename_chart(M, m_names)
        images = {x: p.substitute({y: M2.var(m_names[y]) for y in M.generators}, M2.universe)
                  for x, p in g.images.items()}
        g = DgMorphism(g.name, M2, N, images)
        M = M2
    res = factorize(g, reserved=L.generators)
    P = res.middle
    bar_names = [res.bars[x] for x in N.generators]
    base = L.base + M.base
    fibers = L.fibers + M.fibers + tuple((b, P.degree_of(b)) for b in bar_names)
    Q0 = DgChart(name or f"{L.name}_x_{M.name}", base, fibers, {}, validate=False)
    U = Q0.universe
    sigma = {res.copies[x]: f.images[x].embed(U) for x in N.generators}
    sigma.update({b: U.var(b) for b in bar_names})
    sigma.update({y: U.var(y) for y in M.generators})
    D = {l: L.d(l).embed(U) for l in L.generators}
    D.update({y: M.d(y).embed(U) for y in M.generators})
    D.update({b: P.d(b).substitute(sigma, U) for b in bar_names})
    Q = DgChart(Q0.name, base, fibers, D)
    to_left = DgMorphism(f"pr_{L.name}", Q, L, {l: Q.var(l) for l in L.generators})
    to_right = DgMorphism(f"pr_{M.name}", Q, M, {y: Q.var(y) for y in M.generators})
    to_middle = DgMorphism(f"to_{P.name}", Q, P, sigma)
    return PullbackResult(Q, to_left, to_right, to_middle, res)


# -- decomposition ---------------------------------------------------------

def decompose(c: DgChart, slot_names: Callable[[str], str] | Mapping[str, str] | None = None
              ) -> list[tuple[DgChart, Section]]:
    """Tower (chart_k, lambda_k), k < amplitude, with chart_{k+1} = zero locus of lambda_k.

    The slot for a generator eta of degree -(k+1) carries D(eta), rewritten in
    chart_k's names.  Slot names default to the generator names.
    """
    rn = _renamer(slot_names)
    cur = {b: b for b in c.base}
    chart = DgChart(f"{c.name}_0", c.base, [], {})
    tower = []
    for k in range(c.amplitude):
        gens = c.fibers_of_degree(-(k + 1))
        images = {g: chart.var(cur[g]) for g in cur}
        slots = [(rn(g), -k) for g in gens]
        comps = {rn(g): c.d(g).substitute(images, chart.universe) for g in gens}
        sec = Section(chart, slots, comps, name=f"lambda_{k}")
        tower.append((chart, sec))
        chart = shifted_zero_locus(sec, name=f"{c.name}_{k + 1}")
        cur.update({g: rn(g) for g in gens})
    return tower


def rebuild(tower: Sequence[tuple[DgChart, Section]], base: DgChart | None = None,
            name: str | None = None) -> DgChart:
    if not tower:
        if base is None:
            raise ValueError("empty tower: the base chart is needed")
        return base
    return shifted_zero_locus(tower[-1][1], name=name)


@dataclass
class IsomorphismPair:
    forward: DgMorphism
    backward: DgMorphism


def chart_isomorphism(a: DgChart, b: DgChart, mapping: Mapping[str, str]) -> IsomorphismPair:
    """Renaming isomorphism a -> b sending generator g of a to mapping[g] of b.

    Both directions are checked as morphisms and as mutually inverse.
    """
    inv = {v: k for k, v in mapping.items()}
    if len(inv) != len(mapping) or set(mapping) != set(a.generators) or set(inv) != set(b.generators):
        raise NameClashError("mapping is not a bijection between generator sets")
    for g, h in mapping.items():
        if a.degree_of(g) != b.degree_of(h):
            raise DegreeError(f"{g} and {h} have different degrees")
    fwd = DgMorphism(f"{a.name}_to_{b.name}", a, b, {h: a.var(g) for g, h in mapping.items()})
    bwd = DgMorphism(f"{b.name}_to_{a.name}", b, a, {g: b.var(h) for g, h in mapping.items()})
    if compose(fwd, bwd) != identity(a) or compose(bwd, fwd) != identity(b):
        raise AssertionError("renaming maps are not inverse")
    return IsomorphismPair(fwd, bwd)


def decompose_roundtrip(c: DgChart, slot_names=None) -> tuple[list, DgChart, IsomorphismPair]:
    tower = decompose(c, slot_names)
    rebuilt = rebuild(tower, base=c, name=f"{c.name}_rebuilt")
    rn = _renamer(slot_names)
    mapping = {g: g for g in c.base}
    mapping.update({g: rn(g) for g, _ in c.fibers})
    return tower, rebuilt, chart_isomorphism(c, rebuilt, mapping)
