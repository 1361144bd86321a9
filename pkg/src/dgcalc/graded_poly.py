"""Free graded-commutative polynomials over Q.

A polynomial lives in a :class:`Universe`, an ordered set of graded
variables.  Variables are sorted by ``(degree, name)`` and every monomial is
stored as a dense exponent tuple in that order, so the sign of bringing odd
factors into order is folded into the coefficient once, at construction.
"""
from __future__ import annotations

import enum
import re
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DegreeError, MissingAssignmentError, UniverseMismatchError

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class GradedVariable:
    __slots__ = ("name", "degree")

    def __init__(self, name: str, degree: int):
        if not isinstance(name, str) or not _IDENT.match(name):
            raise ValueError(f"bad variable name {name!r}")
        if not isinstance(degree, int) or degree > 0:
            raise DegreeError(f"variable {name} has degree {degree}; degrees must be <= 0")
        self.name = name
        self.degree = degree

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    @property
    def is_base(self) -> bool:
        return self.degree == 0

    def sort_key(self):
        return (self.degree, self.name)

    def __eq__(self, other):
        return (isinstance(other, GradedVariable)
                and self.name == other.name and self.degree == other.degree)

    def __hash__(self):
        return hash((self.name, self.degree))

    def __repr__(self):
        return f"GradedVariable({self.name!r}, {self.degree})"


class Universe:
    """Canonically ordered variable set shared by a family of polynomials."""

    __slots__ = ("variables", "names", "_index", "_odd_bits", "_hash")

    def __init__(self, variables: Iterable[GradedVariable]):
        vs = sorted(variables, key=GradedVariable.sort_key)
        names = [v.name for v in vs]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate variable names: {', '.join(dup)}")
        self.variables = tuple(vs)
        self.names = tuple(names)
        self._index = {n: i for i, n in enumerate(names)}
        self._odd_bits = tuple(i for i, v in enumerate(vs) if v.odd)
        self._hash = hash(self.variables)

    @classmethod
    def of(cls, **degrees: int) -> "Universe":
        return cls(GradedVariable(n, d) for n, d in degrees.items())

    def __len__(self):
        return len(self.variables)

    def __contains__(self, name) -> bool:
        if isinstance(name, GradedVariable):
            i = self._index.get(name.name)
            return i is not None and self.variables[i] == name
        return name in self._index

    def __eq__(self, other):
        return self is other or (isinstance(other, Universe) and self.variables == other.variables)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Universe(" + ", ".join(f"{v.name}:{v.degree}" for v in self.variables) + ")"

    def index(self, name) -> int:
        if isinstance(name, GradedVariable):
            name = name.name
        try:
            return self._index[name]
        except KeyError:
            raise UniverseMismatchError(f"variable {name} not in {self!r}") from None

    def variable(self, name: str) -> GradedVariable:
        return self.variables[self.index(name)]

    def degree_of(self, name: str) -> int:
        return self.variable(name).degree

    @property
    def base(self) -> tuple[GradedVariable, ...]:
        return tuple(v for v in self.variables if v.degree == 0)

    @property
    def fibers(self) -> tuple[GradedVariable, ...]:
        return tuple(v for v in self.variables if v.degree < 0)

    def extended(self, variables: Iterable[GradedVariable]) -> "Universe":
        return Universe(self.variables + tuple(variables))

    def odd_mask(self, exps: tuple) -> int:
        m = 0
        for i in self._odd_bits:
            if exps[i]:
                m |= 1 << i
        return m

    def zero(self) -> "GradedPolynomial":
        return GradedPolynomial(self, {})

    def const(self, c) -> "GradedPolynomial":
        c = as_fraction(c)
        return GradedPolynomial(self, {(0,) * len(self): c} if c else {})

    def var(self, name: str) -> "GradedPolynomial":
        e = [0] * len(self)
        e[self.index(name)] = 1
        return GradedPolynomial(self, {tuple(e): Fraction(1)})

    def monomial(self, factors: Mapping[str, int], coeff=1) -> "GradedPolynomial":
        """Monomial with factors taken in canonical order (so no sign)."""
        e = [0] * len(self)
        for n, k in factors.items():
            i = self.index(n)
            if k < 0:
                raise ValueError("negative exponent")
            if k > 1 and self.variables[i].odd:
                return self.zero()
            e[i] += k
        c = as_fraction(coeff)
        return GradedPolynomial(self, {tuple(e): c} if c else {})


class Homogeneity(enum.Enum):
    INHOMOGENEOUS = "inhomogeneous"
    ZERO = "zero polynomial"

    def __str__(self):
        return self.value


INHOMOGENEOUS = Homogeneity.INHOMOGENEOUS
ZERO_POLYNOMIAL = Homogeneity.ZERO


def _popcount(n: int) -> int:
    return bin(n).count("1")


def _mul_sign(ma: int, mb: int) -> int:
    """Sign of sorting the odd factors of a·b; 0 when an odd factor repeats."""
    if ma & mb:
        return 0
    parity = 0
    while mb:
        low = mb & -mb
        parity += _popcount(ma & ~((low << 1) - 1))
        mb ^= low
    return -1 if parity & 1 else 1


class GradedPolynomial:
    """Immutable element of the free graded-commutative algebra on a universe."""

    __slots__ = ("universe", "_terms", "_hash")

    def __init__(self, universe: Universe, terms: Mapping[tuple, Fraction]):
        self.universe = universe
        self._terms = {e: c for e, c in terms.items() if c}
        self._hash = None

    # -- inspection -------------------------------------------------------
    def terms(self) -> list[tuple[tuple, Fraction]]:
        return sorted(self._terms.items(), reverse=True)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def coefficient(self, exps: tuple) -> Fraction:
        return self._terms.get(exps, Fraction(0))

    def monomial_degree(self, exps: tuple) -> int:
        vs = self.universe.variables
        return sum(k * vs[i].degree for i, k in enumerate(exps) if k)

    def variables_used(self) -> set[str]:
        names = self.universe.names
        used = set()
        for e in self._terms:
            used.update(names[i] for i, k in enumerate(e) if k)
        return used

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self.universe), Fraction(0))

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "GradedPolynomial"):
        if self.universe != other.universe:
            raise UniverseMismatchError(f"{self.universe!r} vs {other.universe!r}")

    def _coerce(self, other) -> "GradedPolynomial":
        if isinstance(other, GradedPolynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.universe.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return GradedPolynomial(self.universe, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPolynomial(self.universe, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "GradedPolynomial":
        c = as_fraction(c)
        return GradedPolynomial(self.universe, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        self._check(other)
        u = self.universe
        out: dict[tuple, Fraction] = {}
        bmasks = [(eb, cb, u.odd_mask(eb)) for eb, cb in other._terms.items()]
        for ea, ca in self._terms.items():
            ma = u.odd_mask(ea)
            for eb, cb, mb in bmasks:
                s = _mul_sign(ma, mb)
                if not s:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + (ca * cb if s > 0 else -ca * cb)
        return GradedPolynomial(u, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = self.universe.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.universe.const(other)
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        return self.universe == other.universe and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.universe, frozenset(self._terms.items())))
        return self._hash

    # -- change of universe ----------------------------------------------
    def embed(self, universe: Universe) -> "GradedPolynomial":
        """Same polynomial viewed in a larger universe."""
        if universe == self.universe:
            return self
        src = self.universe
        pos = []
        for v in src.variables:
            if v not in universe:
                raise UniverseMismatchError(f"{v.name} missing from target universe")
            pos.append(universe.index(v.name))
        # canonical order is global, so shared variables keep their relative order: no sign
        n = len(universe)
        out = {}
        for e, c in self._terms.items():
            ne = [0] * n
            for i, k in enumerate(e):
                if k:
                    ne[pos[i]] = k
            out[tuple(ne)] = c
        return GradedPolynomial(universe, out)

    def substitute(self, images: Mapping[str, "GradedPolynomial"], universe: Universe) -> "GradedPolynomial":
        """Algebra map sending each variable to its image (all in ``universe``)."""
        names = self.universe.names
        powers: dict[tuple[int, int], GradedPolynomial] = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                if names[i] not in images:
                    raise UniverseMismatchError(f"no image for variable {names[i]}")
                img = images[names[i]]
                if img.universe != universe:
                    raise UniverseMismatchError(f"image of {names[i]} lives in another universe")
                powers[key] = img if k == 1 else power(i, k - 1) * img
            return powers[key]

        acc: dict[tuple, Fraction] = {}
        for e, c in self._terms.items():
            t = universe.const(c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
                    if not t:
                        break
            for te, tc in t._terms.items():
                acc[te] = acc.get(te, 0) + tc
        return GradedPolynomial(universe, acc)

    def evaluate_base(self, point: Mapping[str, Fraction]) -> "GradedPolynomial":
        """Substitute values for base variables, keeping fiber variables."""
        u = self.universe
        vals = []
        for i, v in enumerate(u.variables):
            if v.degree == 0:
                if v.name not in point:
                    raise MissingAssignmentError(f"no value for base variable {v.name}")
                vals.append((i, as_fraction(point[v.name])))
        out: dict[tuple, Fraction] = {}
        for e, c in self._terms.items():
            e = list(e)
            for i, x in vals:
                if e[i]:
                    c = c * x ** e[i]
                    e[i] = 0
            if c:
                key = tuple(e)
                out[key] = out.get(key, 0) + c
        return GradedPolynomial(u, out)

    # -- formatting ------------------------------------------------------
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"GradedPolynomial({format_polynomial(self)!r})"


def _check_same(p: GradedPolynomial, q: GradedPolynomial):
    if p.universe != q.universe:
        raise UniverseMismatchError(f"{p.universe!r} vs {q.universe!r}")


def mul(p: GradedPolynomial, q: GradedPolynomial) -> GradedPolynomial:
    _check_same(p, q)
    return p * q


def add(p: GradedPolynomial, q: GradedPolynomial) -> GradedPolynomial:
    _check_same(p, q)
    return p + q


def left_partial(p: GradedPolynomial, v) -> GradedPolynomial:
    """Left derivative: bring ``v`` to the front with Koszul signs, then differentiate."""
    u = p.universe
    name = v.name if isinstance(v, GradedVariable) else v
    if isinstance(v, GradedVariable) and v not in u:
        raise UniverseMismatchError(f"{v!r} not in {u!r}")
    i = u.index(name)
    odd = u.variables[i].odd
    below = (1 << i) - 1
    out: dict[tuple, Fraction] = {}
    for e, c in p.items():
        k = e[i]
        if not k:
            continue
        c = c * k
        if odd and _popcount(u.odd_mask(e) & below) & 1:
            c = -c
        ne = e[:i] + (k - 1,) + e[i + 1:]
        out[ne] = out.get(ne, 0) + c
    return GradedPolynomial(u, out)


def evaluate_at_core(p: GradedPolynomial, point: Mapping[str, Fraction]) -> Fraction:
    """Value on the core: fibers set to zero, base variables to ``point``."""
    u = p.universe
    base_idx = []
    for i, v in enumerate(u.variables):
        if v.degree == 0:
            if v.name not in point:
                raise MissingAssignmentError(f"no value for base variable {v.name}")
            base_idx.append(i)
    fiber_idx = [i for i, v in enumerate(u.variables) if v.degree < 0]
    vals = {i: as_fraction(point[u.variables[i].name]) for i in base_idx}
    total = Fraction(0)
    for e, c in p.items():
        if any(e[i] for i in fiber_idx):
            continue
        for i in base_idx:
            if e[i]:
                c = c * vals[i] ** e[i]
        total += c
    return total


def homogeneous_degree(p: GradedPolynomial):
    """Common degree of all terms, ``INHOMOGENEOUS``, or ``ZERO_POLYNOMIAL``."""
    degs = {p.monomial_degree(e) for e, _ in p.items()}
    if not degs:
        return ZERO_POLYNOMIAL
    if len(degs) > 1:
        return INHOMOGENEOUS
    return degs.pop()


def has_degree(p: GradedPolynomial, degree: int) -> bool:
    """True when ``p`` is zero or homogeneous of ``degree``."""
    h = homogeneous_degree(p)
    return h is ZERO_POLYNOMIAL or h == degree


def base_degree(p: GradedPolynomial, exps: tuple) -> int:
    vs = p.universe.variables
    return sum(k for i, k in enumerate(exps) if k and vs[i].degree == 0)


def fiber_part(universe: Universe, exps: tuple) -> tuple:
    vs = universe.variables
    return tuple(k if vs[i].degree < 0 else 0 for i, k in enumerate(exps))


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(universe: Universe, exps: tuple) -> str:
    parts = []
    for i, k in enumerate(exps):
        if k == 1:
            parts.append(universe.names[i])
        elif k:
            parts.append(f"{universe.names[i]}^{k}")
    return "*".join(parts)


def format_polynomial(p: GradedPolynomial) -> str:
    """Canonical text, reparseable by :func:`dgcalc.expr.parse_polynomial`."""
    if not p:
        return "0"
    out = []
    for e, c in p.terms():
        mono = format_monomial(p.universe, e)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
