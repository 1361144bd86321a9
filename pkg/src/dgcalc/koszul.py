from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .chart import DgChart, _as_poly
from .errors import CohomologicalError, DegreeError, NameClashError
from .graded_poly import INHOMOGENEOUS, ZERO_POLYNOMIAL, homogeneous_degree


@dataclass
class KoszulInput:
    chart: DgChart
    elements: Sequence[tuple[object, str]]


def koszul(data: KoszulInput | DgChart, elements: Sequence[tuple[object, str]] | None = None,
           name: str | None = None) -> DgChart:
    """Adjoin xi_i of degree |a_i| - 1 with D(xi_i) = a_i.

    Accepts either a :class:`KoszulInput` or ``(chart, elements)``; elements
    are ``(a_i, fresh name)`` or ``(a_i, fresh name, degree of a_i)``, with
    ``a_i`` a polynomial or expression.  A zero element without an explicit
    degree is taken to have degree 0.
    """
    if isinstance(data, KoszulInput):
        base, elements = data.chart, data.elements
    else:
        base = data
    elements = list(elements or [])
    taken = set(base.generators)
    new = []
    for item in elements:
        a, xi = item[0], item[1]
        want = item[2] if len(item) > 2 else None
        if xi in taken:
            raise NameClashError(f"Koszul generator name {xi!r} is already used")
        taken.add(xi)
        p = _as_poly(a, base.universe)
        deg = homogeneous_degree(p)
        if deg is INHOMOGENEOUS:
            raise DegreeError(f"Koszul element {p} for {xi} is not homogeneous")
        if deg is ZERO_POLYNOMIAL:
            deg = 0 if want is None else want
        elif want is not None and deg != want:
            raise DegreeError(f"Koszul element {p} has degree {deg}, expected {want}")
        if deg > 0:
            raise DegreeError(f"Koszul element {p} has degree {deg}; it must be <= 0")
        residue = base.D(p)
        if residue:
            raise CohomologicalError(f"Koszul element {p} is not closed: D(a) = {residue}")
        new.append((xi, deg - 1, p))
    fibers = base.fibers + tuple((xi, d) for xi, d, _ in new)
    tmp = DgChart(name or base.name, base.base, fibers, {}, validate=False)
    D = {g: base.d(g).embed(tmp.universe) for g in base.generators}
    for xi, _, p in new:
        D[xi] = p.embed(tmp.universe)
    return DgChart(tmp.name, base.base, fibers, D, validate=True)
