"""Brute-force cohomology of a chart's function algebra in a bounded window.

For each cohomological degree k the space O^k_{<=d} is spanned by monomials
of degree k whose base part has total degree at most d.  Fibers are strictly
negative, so each such space is finite.  The reported dimension is

    dim ker(D on O^k_{<=d}) - dim(D(O^{k-1}_{<=d+1}) ∩ O^k_{<=d}).

Kernels are exact.  Images are exact whenever no coboundary in O^k_{<=d} needs
a primitive of base degree above d+1; the ``stable`` flag compares d with
d+1 and is the guard against that.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .chart import DgChart
from .errors import InputError, OracleLimitError
from .graded_poly import GradedPolynomial
from .linalg import rank
from .parallel import ordered_map

MAX_BASIS_ENV = "DGCALC_MAX_BASIS"
DEFAULT_MAX_BASIS = 20000


@dataclass(frozen=True)
class TruncationSpec:
    max_base_degree: int
    k_min: int
    weight: int | None = None
    weights: Mapping[str, int] | None = None
    max_basis: int | None = None

    def __post_init__(self):
        if self.max_base_degree < 0:
            raise InputError("max base degree must be >= 0")
        if self.k_min > 0:
            raise InputError("window must be [k_min, 0] with k_min <= 0")


@dataclass(frozen=True)
class BoundedCohomology:
    dims: dict[int, int]
    stable: bool
    unstable_degrees: tuple[int, ...] = ()
    next_dims: dict[int, int] = field(default_factory=dict)

    def __getitem__(self, k: int) -> int:
        return self.dims[k]


def _cap(t: TruncationSpec) -> int:
    if t.max_basis is not None:
        return t.max_basis
    try:
        return int(os.environ.get(MAX_BASIS_ENV, DEFAULT_MAX_BASIS))
    except ValueError:
        return DEFAULT_MAX_BASIS


def _fiber_exponents(degrees: list[int], odd: list[bool], k: int):
    """Exponent vectors e with sum(e_i * degrees_i) == k."""
    out = []

    def rec(i, remaining, acc):
        if i == len(degrees):
            if remaining == 0:
                out.append(tuple(acc))
            return
        d = degrees[i]
        top = 1 if odd[i] else remaining // d
        for e in range(0, top + 1):
            if e * d < remaining:
                break
            acc.append(e)
            rec(i + 1, remaining - e * d, acc)
            acc.pop()

    rec(0, k, [])
    return out


def _base_exponents(n: int, d: int):
    out = []

    def rec(i, left, acc):
        if i == n:
            out.append(tuple(acc))
            return
        for e in range(left + 1):
            acc.append(e)
            rec(i + 1, left - e, acc)
            acc.pop()

    rec(0, d, [])
    return out


class _Basis:
    def __init__(self, c: DgChart, t: TruncationSpec):
        u = c.universe
        self.c = c
        self.u = u
        self.base_idx = [i for i, v in enumerate(u.variables) if v.degree == 0]
        self.fib_idx = [i for i, v in enumerate(u.variables) if v.degree < 0]
        self.fib_deg = [u.variables[i].degree for i in self.fib_idx]
        self.fib_odd = [u.variables[i].odd for i in self.fib_idx]
        self.weight = t.weight
        w = dict(t.weights or {})
        self.w = [w.get(v.name, 1) for v in u.variables]
        self.cap = _cap(t)
        if t.weight is not None:
            self._check_weight_homogeneous()

    def weight_of(self, e) -> int:
        return sum(k * self.w[i] for i, k in enumerate(e) if k)

    def _check_weight_homogeneous(self):
        for i, v in enumerate(self.u.variables):
            for e, _ in self.c.d(v.name).items():
                if self.weight_of(e) != self.w[i]:
                    raise InputError(f"D is not weight-homogeneous on {v.name}; "
                                     "weight selection is undefined")

    def base_degree(self, e) -> int:
        return sum(e[i] for i in self.base_idx)

    def monomials(self, k: int, d: int) -> list[tuple]:
        n = len(self.u)
        fibs = _fiber_exponents(self.fib_deg, self.fib_odd, k)
        bases = _base_exponents(len(self.base_idx), d)
        if len(fibs) * len(bases) > self.cap:
            raise OracleLimitError(
                f"degree {k} with base degree <= {d} needs {len(fibs) * len(bases)} basis "
                f"monomials, above the cap {self.cap} (set {MAX_BASIS_ENV} to raise it)")
        out = []
        for fe in fibs:
            for be in bases:
                e = [0] * n
                for i, x in zip(self.fib_idx, fe):
                    e[i] = x
                for i, x in zip(self.base_idx, be):
                    e[i] = x
                e = tuple(e)
                if self.weight is None or self.weight_of(e) == self.weight:
                    out.append(e)
        return out

    def images(self, monos: list[tuple]) -> list[GradedPolynomial]:
        D = self.c.D
        return [D(GradedPolynomial(self.u, {e: Fraction(1)})) for e in monos]


def _dims(basis: _Basis, k_min: int, d: int) -> dict[int, int]:
    def one(k):
        dom = basis.monomials(k, d)
        z = len(dom) - rank(_rows(basis.images(dom)))
        pre = basis.monomials(k - 1, d + 1)
        imgs = basis.images(pre)
        full = rank(_rows(imgs))
        outside = rank(_rows(imgs, lambda e: basis.base_degree(e) > d))
        return z - (full - outside)

    ks = list(range(k_min, 1))
    return dict(zip(ks, ordered_map(one, ks)))


def _rows(polys, keep=None):
    index: dict[tuple, int] = {}
    rows = []
    for p in polys:
        row = {}
        for e, c in p.items():
            if keep is not None and not keep(e):
                continue
            j = index.setdefault(e, len(index))
            row[j] = c
        rows.append(row)
    return rows


def bounded_cohomology(c: DgChart, t: TruncationSpec) -> BoundedCohomology:
    basis = _Basis(c, t)
    a = _dims(basis, t.k_min, t.max_base_degree)
    b = _dims(basis, t.k_min, t.max_base_degree + 1)
    bad = tuple(k for k in a if a[k] != b[k])
    return BoundedCohomology(a, not bad, bad, b)
