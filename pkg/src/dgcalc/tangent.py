"""Tangent complexes at classical points and pointwise weak equivalences.

A complex with ``start = s`` has spaces in degrees ``s, s+1, ...``;
``differentials[i]`` maps degree ``s+i`` to ``s+i+1`` and is stored as a
``dims[i+1] x dims[i]`` matrix acting on column vectors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .chart import (DgChart, DgMorphism, Point, ProbeCheck, format_point, linear_coefficient,
                    linearize, require_classical)
from .errors import ChainMapError
from .linalg import Matrix, identity, is_zero, matmul, rank, zeros
from .parallel import ordered_map


@dataclass(frozen=True)
class TangentComplex:
    dims: tuple[int, ...]
    differentials: tuple[Matrix, ...]
    start: int = 0

    def __post_init__(self):
        if len(self.differentials) != max(len(self.dims) - 1, 0):
            raise ValueError("need one differential between consecutive degrees")
        for i, d in enumerate(self.differentials):
            if len(d) != self.dims[i + 1] or any(len(row) != self.dims[i] for row in d):
                raise ValueError(f"differential {i} has the wrong shape")
        for i in range(len(self.differentials) - 1):
            prod = matmul(self.differentials[i + 1], self.differentials[i], self.dims[i + 1], self.dims[i])
            if not is_zero(prod):
                raise ValueError(f"d*d != 0 at degree {self.start + i}")

    @property
    def end(self) -> int:
        return self.start + len(self.dims) - 1

    def dim(self, k: int) -> int:
        i = k - self.start
        return self.dims[i] if 0 <= i < len(self.dims) else 0

    def d(self, k: int) -> Matrix:
        """Differential out of degree ``k`` (a zero matrix outside the range)."""
        i = k - self.start
        if 0 <= i < len(self.differentials):
            return self.differentials[i]
        return zeros(self.dim(k + 1), self.dim(k))


def tangent_complex(c: DgChart, p: Point) -> TangentComplex:
    require_classical(c, p)
    levels = [c.generators_of_degree(-k) for k in range(c.amplitude + 1)]
    diffs = []
    for k in range(c.amplitude):
        diffs.append([[linear_coefficient(c.d(l), j, p) for j in levels[k]] for l in levels[k + 1]])
    return TangentComplex(tuple(len(l) for l in levels), tuple(diffs))


def cohomology_dims(t: TangentComplex) -> list[int]:
    ranks = [rank(d) for d in t.differentials]
    out = []
    for i, n in enumerate(t.dims):
        out.append(n - (ranks[i] if i < len(ranks) else 0) - (ranks[i - 1] if i > 0 else 0))
    return out


def euler_characteristic(values: Sequence[int], start: int = 0) -> int:
    return sum((-1) ** ((start + i) % 2) * v for i, v in enumerate(values))


@dataclass(frozen=True)
class ChainMap:
    """Degreewise matrices ``maps[k]: source^k -> target^k``, both complexes starting at 0."""

    source: TangentComplex
    target: TangentComplex
    maps: tuple[Matrix, ...]

    def __post_init__(self):
        if self.source.start != self.target.start:
            raise ChainMapError("complexes must start in the same degree")
        for k in range(self.source.start, self.top + 1):
            F, G = self.F(k), self.F(k + 1)
            lhs = matmul(self.target.d(k), F, self.target.dim(k), self.source.dim(k))
            rhs = matmul(G, self.source.d(k), self.source.dim(k + 1), self.source.dim(k))
            if lhs != rhs:
                raise ChainMapError(f"square at degree {k} does not commute")

    @property
    def top(self) -> int:
        return max(self.source.end, self.target.end)

    def F(self, k: int) -> Matrix:
        i = k - self.source.start
        if 0 <= i < len(self.maps):
            return self.maps[i]
        return zeros(self.target.dim(k), self.source.dim(k))


def tangent_chain_map(f: DgMorphism, p: Point) -> ChainMap:
    require_classical(f.source, p)
    src = tangent_complex(f.source, p)
    tgt = tangent_complex(f.target, f.map_point(p))
    lin = linearize(f, p)
    return ChainMap(src, tgt, tuple(lin[k] for k in sorted(lin)))


def identity_chain_map(t: TangentComplex) -> ChainMap:
    return ChainMap(t, t, tuple(identity(n) for n in t.dims))


def mapping_cone(F: ChainMap) -> TangentComplex:
    """cone^k = V^{k+1} + W^k with d(v, w) = (-d v, F v + d w)."""
    V, W = F.source, F.target
    lo, hi = V.start - 1, F.top
    dims = [V.dim(k + 1) + W.dim(k) for k in range(lo, hi + 1)]
    diffs = []
    for k in range(lo, hi):
        a, b = V.dim(k + 1), W.dim(k)          # source blocks
        a2, b2 = V.dim(k + 2), W.dim(k + 1)    # target blocks
        dv, fv, dw = V.d(k + 1), F.F(k + 1), W.d(k)
        m = zeros(a2 + b2, a + b)
        for i in range(a2):
            for j in range(a):
                m[i][j] = -dv[i][j]
        for i in range(b2):
            for j in range(a):
                m[a2 + i][j] = fv[i][j]
            for j in range(b):
                m[a2 + i][a + j] = dw[i][j]
        diffs.append(m)
    return TangentComplex(tuple(dims), tuple(diffs), lo)


def is_acyclic(t: TangentComplex) -> bool:
    return all(h == 0 for h in cohomology_dims(t))


def is_pointwise_weq(f: DgMorphism, probes: Sequence[Point]) -> ProbeCheck:
    """Tangent quasi-isomorphism at each probe.

    Only tangent data at the supplied probes is examined; bijectivity on
    classical loci is not decided.
    """
    for p in probes:
        require_classical(f.source, p)

    def at(p):
        cone = mapping_cone(tangent_chain_map(f, p))
        for k, h in zip(range(cone.start, cone.end + 1), cohomology_dims(cone)):
            if h:
                return k, h
        return None

    for p, bad in zip(probes, ordered_map(at, probes)):
        if bad is not None:
            k, h = bad
            return ProbeCheck(False, dict(p), k,
                              f"mapping cone has H^{k} of dimension {h} at {format_point(p)}")
    return ProbeCheck(True, message="tangent data checked at supplied probes only")
