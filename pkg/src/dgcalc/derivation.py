from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import UniverseMismatchError
from .graded_poly import (GradedPolynomial, Universe, has_degree, homogeneous_degree,
                          left_partial)


class Derivation:
    """Graded derivation of a fixed degree, stored by its values on generators.

    Generators missing from ``values`` are sent to zero.
    """

    __slots__ = ("universe", "degree", "values")

    def __init__(self, universe: Universe, degree: int, values: Mapping[str, GradedPolynomial] = ()):
        vals = {}
        for name, p in dict(values).items():
            if name not in universe:
                raise UniverseMismatchError(f"derivation value on unknown generator {name}")
            if p.universe != universe:
                raise UniverseMismatchError(f"value on {name} lives in another universe")
            if p:
                vals[name] = p
        self.universe = universe
        self.degree = degree
        self.values = vals

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    def value(self, name: str) -> GradedPolynomial:
        p = self.values.get(name)
        if p is None:
            self.universe.index(name)
            return self.universe.zero()
        return p

    def __call__(self, p: GradedPolynomial) -> GradedPolynomial:
        return apply(self, p)

    def degree_violation(self):
        """First generator whose value has the wrong degree, as (name, expected, found)."""
        for v in self.universe.variables:
            p = self.values.get(v.name)
            if p is not None and not has_degree(p, v.degree + self.degree):
                return v.name, v.degree + self.degree, homogeneous_degree(p)
        return None

    def __eq__(self, other):
        return (isinstance(other, Derivation) and self.universe == other.universe
                and self.degree == other.degree and self.values == other.values)

    def __hash__(self):
        return hash((self.universe, self.degree, frozenset(self.values.items())))

    def __repr__(self):
        body = ", ".join(f"{n} -> {p}" for n, p in sorted(self.values.items()))
        return f"Derivation(degree={self.degree}, {{{body}}})"


def _check(a, b):
    if a.universe != b.universe:
        raise UniverseMismatchError(f"{a.universe!r} vs {b.universe!r}")


def apply(X: Derivation, p: GradedPolynomial) -> GradedPolynomial:
    # X = sum_v X(v) * d/dv with left derivatives; this is the unique extension
    _check(X, p)
    used = p.variables_used()
    out = p.universe.zero()
    for name, xv in X.values.items():
        if name in used:
            out = out + xv * left_partial(p, name)
    return out


def commutator(X: Derivation, Y: Derivation) -> Derivation:
    _check(X, Y)
    sign = -1 if (X.degree * Y.degree) % 2 else 1
    vals = {}
    for v in X.universe.names:
        val = apply(X, Y.value(v)) - apply(Y, X.value(v)).scale(sign)
        if val:
            vals[v] = val
    return Derivation(X.universe, X.degree + Y.degree, vals)


def lie_derivative(D: Derivation, X: Derivation) -> Derivation:
    return commutator(D, X)


@dataclass(frozen=True)
class CohomologicalCheck:
    ok: bool
    generator: str | None = None
    residue: GradedPolynomial | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_cohomological(D: Derivation) -> CohomologicalCheck:
    if D.degree != 1:
        return CohomologicalCheck(False, reason=f"degree {D.degree}, expected 1")
    for v in D.universe.names:
        val = D.values.get(v)
        if val is None:
            continue
        r = apply(D, val)
        if r:
            return CohomologicalCheck(False, v, r, f"D(D({v})) = {r}")
    return CohomologicalCheck(True)


def euler_field(universe: Universe) -> Derivation:
    return Derivation(universe, 0, {v.name: universe.var(v.name).scale(v.degree)
                                    for v in universe.variables if v.degree})


def zero_derivation(universe: Universe, degree: int) -> Derivation:
    return Derivation(universe, degree, {})
