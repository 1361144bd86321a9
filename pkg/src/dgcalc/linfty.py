"""Structure constants of curved L-infinity[1] bundles and their dg-charts.

A basis element ``e`` of degree k >= 1 corresponds to a chart generator of
the same name and degree -k.  A bracket coefficient on (output, inputs) is
the base polynomial multiplying the monomial of the inputs in D(output);
multisets are stored once, with no factorial weights.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .chart import DgChart, _as_poly, base_universe, restrict
from .derivation import is_cohomological
from .errors import DegreeError, NameClashError, UnknownIdentifierError
from .graded_poly import GradedPolynomial, GradedVariable, Universe


class CurvedLInftyChart:
    def __init__(self, name: str, base: Sequence[str], elements: Sequence[tuple[str, int]],
                 brackets: Iterable[tuple[str, Sequence[str], object]] = ()):
        self.name = name
        self.base = tuple(base)
        self.elements = tuple((e, int(k)) for e, k in elements)
        names = list(self.base) + [e for e, _ in self.elements]
        if len(set(names)) != len(names):
            raise NameClashError(f"linfty {name}: repeated names")
        for e, k in self.elements:
            if k < 1:
                raise DegreeError(f"linfty {name}: element {e} has degree {k}; degrees must be >= 1")
        self.base_universe = Universe(GradedVariable(b, 0) for b in self.base)
        self._fiber_universe = Universe(GradedVariable(e, -k) for e, k in self.elements)
        self.degree = dict(self.elements)
        acc: dict[tuple[str, tuple[str, ...]], GradedPolynomial] = {}
        for out, inputs, coeff in brackets:
            key, sign = self._normalize(out, inputs)
            if sign == 0:
                continue
            p = _as_poly(coeff, self.base_universe).scale(sign)
            acc[key] = acc[key] + p if key in acc else p
        self.brackets = {k: v for k, v in acc.items() if v}

    def _normalize(self, out: str, inputs: Sequence[str]):
        for e in (out, *inputs):
            if e not in self.degree:
                raise UnknownIdentifierError(f"linfty {self.name}: unknown element {e!r}")
        if self.degree[out] != sum(self.degree[e] for e in inputs) + 1:
            raise DegreeError(f"linfty {self.name}: bracket into {out} from ({' '.join(inputs)}) "
                              f"violates |out| = sum |in| + 1")
        u = self._fiber_universe
        mono = u.const(1)
        for e in inputs:
            mono = mono * u.var(e)
        if not mono:
            return None, 0
        (exps, c), = mono.items()
        canon = []
        for i, k in enumerate(exps):
            canon.extend([u.names[i]] * k)
        return (out, tuple(canon)), int(c)

    def arity_terms(self, k: int) -> dict:
        return {key: v for key, v in self.brackets.items() if len(key[1]) == k}

    def __eq__(self, other):
        return (isinstance(other, CurvedLInftyChart) and self.base == other.base
                and set(self.elements) == set(other.elements) and self.brackets == other.brackets)

    def __repr__(self):
        return f"CurvedLInftyChart({self.name!r}, {len(self.brackets)} brackets)"


def to_dg_chart(L: CurvedLInftyChart, name: str | None = None) -> DgChart:
    fibers = [(e, -k) for e, k in L.elements]
    c0 = DgChart(name or L.name, L.base, fibers, {}, validate=False)
    U = c0.universe
    D: dict[str, GradedPolynomial] = {}
    for (out, inputs), coeff in sorted(L.brackets.items()):
        term = coeff.embed(U)
        for e in inputs:
            term = term * U.var(e)
        D[out] = D[out] + term if out in D else term
    return DgChart(c0.name, L.base, fibers, D, validate=False)


def from_dg_chart(c: DgChart, name: str | None = None) -> CurvedLInftyChart:
    u = c.universe
    bu = base_universe(c)
    fib = [i for i, v in enumerate(u.variables) if v.degree < 0]
    brackets = []
    for out, _ in c.fibers:
        groups: dict[tuple, dict] = {}
        for e, coeff in c.d(out).items():
            fpart = tuple(e[i] for i in fib)
            base_e = tuple(0 if i in fib else k for i, k in enumerate(e))
            groups.setdefault(fpart, {})[base_e] = coeff
        for fpart, terms in groups.items():
            inputs = []
            for i, k in zip(fib, fpart):
                inputs.extend([u.names[i]] * k)
            coeff = restrict(GradedPolynomial(u, terms), bu)
            brackets.append((out, inputs, coeff))
    return CurvedLInftyChart(name or c.name, c.base, [(n, -d) for n, d in c.fibers], brackets)


@dataclass(frozen=True)
class LInftyCheck:
    ok: bool
    arity: int | None = None
    generator: str | None = None
    residue: GradedPolynomial | None = None

    def __bool__(self):
        return self.ok


def _fiber_arity(u: Universe, exps: tuple) -> int:
    return sum(k for i, k in enumerate(exps) if u.variables[i].degree < 0)


def check_linfty(L: CurvedLInftyChart) -> LInftyCheck:
    """D^2 = 0 for the dual chart; on failure, the lowest arity at which it breaks."""
    c = to_dg_chart(L)
    if is_cohomological(c.D):
        return LInftyCheck(True)
    best = None
    for g, _ in c.fibers:
        r = c.D(c.d(g))
        for e, _ in r.items():
            a = _fiber_arity(c.universe, e)
            if best is None or a < best[0]:
                best = (a, g, r)
    return LInftyCheck(False, best[0], best[1], best[2])
